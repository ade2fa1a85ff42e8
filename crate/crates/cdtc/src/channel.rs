//! Biased single-qubit Pauli channels and the hashing bound.

use crate::algebra::{Pauli, PauliVec};
use crate::Error;
use rand::Rng;

/// Bias η = p_Z/p_X = p_Z/p_Y; infinity is a separate variant.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Bias {
    Finite(f64),
    Infinite,
}

impl Bias {
    pub fn parse(s: &str) -> Result<Bias, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Bias::Infinite),
            t => {
                let v: f64 = t.parse().map_err(|_| Error::Parse(format!("bad bias {s}")))?;
                if v > 0.0 && v.is_finite() {
                    Ok(Bias::Finite(v))
                } else {
                    Err(Error::Invalid(format!("bias must be positive, got {s}")))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Bias::Finite(v) => format!("{v}"),
            Bias::Infinite => "inf".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BiasedChannel {
    pub p: f64,
    pub eta: Bias,
}

impl BiasedChannel {
    pub fn new(p: f64, eta: Bias) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid(format!("error rate {p} outside [0,1]")));
        }
        if let Bias::Finite(e) = eta {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Invalid(format!("bias must be positive, got {e}")));
            }
        }
        Ok(Self { p, eta })
    }

    /// (p_X, p_Y, p_Z).
    pub fn probs(&self) -> (f64, f64, f64) {
        match self.eta {
            Bias::Infinite => (0.0, 0.0, self.p),
            Bias::Finite(e) => {
                let a = self.p / (2.0 + e);
                (a, a, self.p * e / (2.0 + e))
            }
        }
    }

    pub fn sample_pauli<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let (px, py, pz) = self.probs();
        let u: f64 = rng.gen();
        if u < pz {
            Pauli::Z
        } else if u < pz + px {
            Pauli::X
        } else if u < pz + px + py {
            Pauli::Y
        } else {
            Pauli::I
        }
    }

    pub fn sample_error<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PauliVec {
        let mut e = PauliVec::identity(n);
        if self.p == 0.0 {
            return e;
        }
        for q in 0..n {
            let p = self.sample_pauli(rng);
            if p != Pauli::I {
                e.set(q, p);
            }
        }
        e
    }

    /// Marginal flip probabilities of the x-bit and the z-bit.
    pub fn decoder_priors(&self) -> (f64, f64) {
        let (px, py, pz) = self.probs();
        (px + py, pz + py)
    }
}

fn entropy(ps: &[f64]) -> f64 {
    ps.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Error rate at which the four-outcome entropy reaches one bit.
pub fn hashing_bound(eta: Bias) -> f64 {
    let h = |p: f64| {
        let c = BiasedChannel { p, eta };
        let (x, y, z) = c.probs();
        entropy(&[1.0 - p, x, y, z]) - 1.0
    };
    let (mut lo, mut hi) = (1e-9, 0.5);
    if let Bias::Infinite = eta {
        // binary entropy reaches 1 exactly at 1/2
        return 0.5;
    }
    assert!(h(lo) < 0.0 && h(hi) >= 0.0, "bisection bracket lost its sign change");
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
