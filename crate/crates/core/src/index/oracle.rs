//! Exact-product reference for small graphs.
//!
//! Every built-in index can be written as `X = A · √B` with `A`, `B` positive
//! rationals built from integer degrees. Both are formed exactly with big
//! rationals and the logarithm is taken once at the end, so the only rounding
//! is in that final `ln`. This is an independent route to the value the
//! log-space accumulator produces one factor at a time.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{IndexError, IndexKind, IsolatedPolicy, LnIndex, LogIndexValue};
use crate::graph::Graph;

const MAX_VERTICES: usize = 64;

/// `ln X_Π(G)` from the exact product; `n <= 64`, built-in indices only.
pub fn exact_ln_oracle(g: &Graph, kind: &IndexKind, policy: IsolatedPolicy) -> Result<LnIndex, IndexError> {
    if g.vertex_count() > MAX_VERTICES {
        return Err(IndexError::OracleTooLarge(g.vertex_count()));
    }
    let int = |x: u64| BigRational::from_integer(x.into());
    let mut a = BigRational::one();
    let mut b = BigRational::one();
    let mut excluded = 0;

    if kind.is_vertex_based() {
        let square = match kind {
            IndexKind::Nk => false,
            IndexKind::Pi1 => true,
            other => return Err(IndexError::OracleUnsupported(other.name().to_string())),
        };
        for &d in g.degrees() {
            if d == 0 {
                match policy {
                    IsolatedPolicy::Exclude => {
                        excluded += 1;
                        continue;
                    }
                    IsolatedPolicy::LogZero => {
                        return Ok(LnIndex {
                            value: LogIndexValue::LogZero,
                            excluded_vertices: 0,
                        })
                    }
                }
            }
            let d = d as u64;
            a *= int(if square { d * d } else { d });
        }
    } else {
        for (du, dv) in g.edge_degrees() {
            let (x, y) = (du as u64, dv as u64);
            match kind {
                IndexKind::Pi2 => a *= int(x * y),
                IndexKind::Pi1Star => a *= int(x + y),
                IndexKind::RPi => b /= int(x * y),
                IndexKind::HPi => a *= BigRational::new(2u64.into(), (x + y).into()),
                IndexKind::ChiPi => b /= int(x + y),
                IndexKind::IdPi => a *= BigRational::new((x * x + y * y).into(), (x * x * y * y).into()),
                IndexKind::GaPi => {
                    a *= BigRational::new(2u64.into(), (x + y).into());
                    b *= int(x * y);
                }
                other => return Err(IndexError::OracleUnsupported(other.name().to_string())),
            }
        }
    }

    Ok(LnIndex {
        value: LogIndexValue::Finite(ln_rational(&a) + 0.5 * ln_rational(&b)),
        excluded_vertices: excluded,
    })
}

fn ln_rational(q: &BigRational) -> f64 {
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

/// `ln N` from the leading 64 bits and the binary exponent.
fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in 64 bits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 leading bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::ln_multiplicative_index;
    use crate::models::{generate, ModelSpec, SeedTriple};

    fn oracle(g: &Graph, kind: IndexKind) -> f64 {
        exact_ln_oracle(g, &kind, IsolatedPolicy::Exclude)
            .unwrap()
            .value
            .finite()
            .unwrap()
    }

    #[test]
    fn hand_values() {
        assert!((oracle(&Graph::path(3), IndexKind::Pi2) - 4f64.ln()).abs() < 1e-15);
        assert!((oracle(&Graph::complete(4), IndexKind::Nk) - 4.0 * 3f64.ln()).abs() < 1e-14);
        assert!((oracle(&Graph::cycle(5), IndexKind::ChiPi) + 5.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn big_integer_log() {
        let x = BigUint::from(3u32).pow(200);
        assert!((ln_biguint(&x) - 200.0 * 3f64.ln()).abs() < 1e-12);
        assert_eq!(ln_biguint(&BigUint::from(1u32)), 0.0);
    }

    #[test]
    fn log_zero_reported_identically() {
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        let o = exact_ln_oracle(&g, &IndexKind::Pi1, IsolatedPolicy::LogZero).unwrap();
        let e = ln_multiplicative_index(&g, &IndexKind::Pi1, IsolatedPolicy::LogZero).unwrap();
        assert_eq!(o, e);
        let o = exact_ln_oracle(&g, &IndexKind::Nk, IsolatedPolicy::Exclude).unwrap();
        assert_eq!(o.excluded_vertices, 1);
    }

    #[test]
    fn rejects_large_and_custom() {
        assert_eq!(
            exact_ln_oracle(&Graph::empty(65), &IndexKind::Nk, IsolatedPolicy::Exclude),
            Err(IndexError::OracleTooLarge(65))
        );
        let custom = IndexKind::Custom(crate::index::DegreeFunction::Vertex(crate::index::VertexFunction::new(
            "c",
            |d| d as f64,
        )));
        assert!(exact_ln_oracle(&Graph::path(3), &custom, IsolatedPolicy::Exclude).is_err());
    }

    #[test]
    fn agrees_with_log_space_on_random_graphs() {
        for i in 0..100u64 {
            let spec = ModelSpec::er(20, 0.05 + 0.009 * i as f64).unwrap();
            let g = generate(&spec, SeedTriple::new(77, 0, i)).unwrap();
            for kind in IndexKind::builtins() {
                let fast = ln_multiplicative_index(&g, &kind, IsolatedPolicy::Exclude).unwrap();
                let slow = exact_ln_oracle(&g, &kind, IsolatedPolicy::Exclude).unwrap();
                assert!((fast.value.to_f64() - slow.value.to_f64()).abs() <= 1e-9, "{kind}");
                assert_eq!(fast.excluded_vertices, slow.excluded_vertices);
            }
        }
    }
}
