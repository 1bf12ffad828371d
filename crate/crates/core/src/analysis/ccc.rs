use num_complex::Complex64;

/// How far the control sequence has progressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CccStage {
    /// After the transfer π pulse: ρ₁₃ has become spin coherence ρ₁₂.
    AfterB,
    /// After transfer and read-out π pulses on the same leg.
    AfterBAndC,
}

/// Controlled coherence conversion: each complete π transfer between the
/// excited state and the auxiliary ground state multiplies the coherence by −i.
pub fn ccc_map(rho13: Complex64, stage: CccStage) -> Complex64 {
    let minus_i = Complex64::new(0.0, -1.0);
    match stage {
        CccStage::AfterB => minus_i * rho13,
        CccStage::AfterBAndC => minus_i * minus_i * rho13,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_turns_imaginary_into_real() {
        let out = ccc_map(Complex64::new(0.0, 0.1), CccStage::AfterB);
        assert!((out - Complex64::new(0.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_transfers_invert() {
        let out = ccc_map(Complex64::new(0.0, 0.1), CccStage::AfterBAndC);
        assert!((out - Complex64::new(0.0, -0.1)).norm() < 1e-15);
    }

    #[test]
    fn zero_stays_zero() {
        for stage in [CccStage::AfterB, CccStage::AfterBAndC] {
            assert_eq!(ccc_map(Complex64::new(0.0, 0.0), stage).norm(), 0.0);
        }
    }
}
