use crate::dynamics::state::StateVector;
use crate::error::{Error, Result};
use crate::operator::{Complex, LinearOperator};

/// `⟨ψ|η|φ⟩ = ψ†·η·φ`.
pub fn eta_inner(psi: &StateVector, phi: &StateVector, eta: &LinearOperator) -> Result<Complex> {
    psi.check_same(phi)?;
    if eta.dim() != psi.space().dim() {
        return Err(Error::DimensionMismatch {
            left: eta.dim(),
            right: psi.space().dim(),
        });
    }
    Ok(psi.amplitudes().dotc(&eta.apply(phi.amplitudes())))
}

/// Indefinite PT form `conj(P·conj(ψ))ᵀ·φ = Σₙ (−1)ⁿ ψₙ φₙ`.
pub fn pt_inner(psi: &StateVector, phi: &StateVector) -> Result<Complex> {
    psi.check_same(phi)?;
    Ok(psi
        .amplitudes()
        .iter()
        .zip(phi.amplitudes().iter())
        .enumerate()
        .map(|(n, (a, b))| if n % 2 == 0 { a * b } else { -(a * b) })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use crate::operator::{I, ONE, ZERO};

    fn space() -> FockSpace {
        FockSpace::new(8, 2).unwrap()
    }

    #[test]
    fn eta_inner_with_identity() {
        let s = space();
        let v = StateVector::basis(s, 0).unwrap();
        assert_eq!(
            eta_inner(&v, &v, &LinearOperator::identity(s)).unwrap(),
            ONE
        );
    }

    #[test]
    fn pt_inner_examples() {
        let s = space();
        let zero = StateVector::basis(s, 0).unwrap();
        let one = StateVector::basis(s, 1).unwrap();
        assert_eq!(pt_inner(&zero, &zero).unwrap(), ONE);
        let iz = zero.scale(I);
        assert_eq!(pt_inner(&iz, &iz).unwrap(), -ONE);
        assert_eq!(pt_inner(&one, &zero).unwrap(), ZERO);
        assert_eq!(pt_inner(&one, &one).unwrap(), -ONE);
    }

    #[test]
    fn mismatched_spaces() {
        let a = StateVector::basis(space(), 0).unwrap();
        let b = StateVector::basis(FockSpace::new(9, 2).unwrap(), 0).unwrap();
        assert!(pt_inner(&a, &b).is_err());
        assert!(eta_inner(
            &a,
            &a,
            &LinearOperator::identity(FockSpace::new(9, 2).unwrap())
        )
        .is_err());
    }
}
