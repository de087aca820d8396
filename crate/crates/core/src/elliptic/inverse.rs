use num_complex::Complex64;

use super::carlson::{carlson_rf, carlson_rf_complex};
use super::Weierstrass;
use crate::error::{Error, Result};

/// Selects one of the two solutions of `wp(z) = w` by the sign of `wp'(z)`.
///
/// The sign is taken on the real part of `wp'`, or on the imaginary part
/// when that component dominates (as on the imaginary axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn of(d: Complex64) -> Branch {
        let s = if d.re.abs() >= d.im.abs() { d.re } else { d.im };
        if s >= 0.0 {
            Branch::Positive
        } else {
            Branch::Negative
        }
    }

    pub fn flipped(self) -> Branch {
        match self {
            Branch::Positive => Branch::Negative,
            Branch::Negative => Branch::Positive,
        }
    }
}

/// A solution written as `base + offset`; the other solution is `base - offset`.
struct Split {
    base: Complex64,
    offset: Complex64,
}

impl Weierstrass {
    /// Solves `wp(z) = w` and returns the solution whose `wp'` has the sign
    /// requested by `branch`.
    ///
    /// Real `w` gives a point on one of the four segments `[0, ω_r]`,
    /// `ω + i[0, |ω′|]`, `ω′ + [0, ω]`, `i[0, |ω′|]` (or the two axes when the
    /// roots are complex); the opposite branch is its reflection about the
    /// base half-period, with the real-axis case reflected into `[ω_r, 2ω_r]`.
    pub fn wp_inverse(&self, w: Complex64, branch: Branch) -> Result<Complex64> {
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite target {w}")));
        }
        let split = if w.im == 0.0 {
            self.split_real(w.re)
        } else {
            self.split_complex(w)?
        };
        let z = split.base + split.offset;
        let check = |z: Complex64| -> Result<Complex64> {
            let v = self.lattice.wp(z);
            if (v - w).norm() > 1e-9 * w.norm().max(1.0) {
                return Err(Error::NoSolution { w });
            }
            Ok(z)
        };
        let d = self.lattice.wp_prime(z);
        let scale = w.norm().max(1.0).powf(1.5);
        if d.norm() <= 1e-12 * scale || Branch::of(d) == branch {
            return check(z);
        }
        check(split.base - split.offset)
    }

    fn split_real(&self, w: f64) -> Split {
        let [e1, e2, e3] = self.roots.e_tilde;
        let p = &self.periods;
        let re = |x: f64| Complex64::new(x, 0.0);
        let im = |y: f64| Complex64::new(0.0, y);
        let real_half = re(p.real_half_period);

        if !self.roots.all_real() {
            let e2 = e2.re;
            let c = |x: f64| Complex64::new(x, 0.0);
            return if w >= e2 {
                let x = carlson_rf_complex(c(w) - e1, c(w - e2), c(w) - e3).re;
                Split {
                    base: real_half,
                    offset: re(x) - real_half,
                }
            } else {
                let y = carlson_rf_complex(e1 - w, c(e2 - w), e3 - w).re;
                Split {
                    base: re(0.0),
                    offset: im(y),
                }
            };
        }

        let (e1, e2, e3) = (e1.re, e2.re, e3.re);
        if w >= e1 {
            let x = carlson_rf(w - e1, w - e2, w - e3);
            Split {
                base: real_half,
                offset: re(x) - real_half,
            }
        } else if w >= e2 {
            let u = e1 + (e1 - e2) * (e1 - e3) / (w - e1);
            let y = carlson_rf(e1 - u, e2 - u, e3 - u);
            Split {
                base: p.omega,
                offset: im(y),
            }
        } else if w > e3 {
            let v = e3 + (e3 - e1) * (e3 - e2) / (w - e3);
            let x = carlson_rf(v - e1, v - e2, v - e3);
            Split {
                base: p.omega_prime,
                offset: re(x),
            }
        } else if w == e3 {
            Split {
                base: p.omega_prime,
                offset: re(0.0),
            }
        } else {
            let y = carlson_rf(e1 - w, e2 - w, e3 - w);
            Split {
                base: re(0.0),
                offset: im(y),
            }
        }
    }

    fn split_complex(&self, w: Complex64) -> Result<Split> {
        let [e1, e2, e3] = self.roots.e_tilde;
        let mut z = carlson_rf_complex(w - e1, w - e2, w - e3);
        for _ in 0..40 {
            let d = self.lattice.wp_prime(z);
            if d.norm() == 0.0 {
                break;
            }
            let step = (self.lattice.wp(z) - w) / d;
            z -= step;
            if step.norm() <= 1e-16 * z.norm().max(1e-300) {
                break;
            }
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NoSolution { w });
        }
        Ok(Split {
            base: Complex64::new(0.0, 0.0),
            offset: z,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::Invariants;
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kernels() -> Vec<Weierstrass> {
        [(0.01, 0.000144), (0.12, -0.016), (1.0, 0.3), (-2.0, 1.0), (3.0, -1.5)]
            .iter()
            .map(|&(g2, g3)| Weierstrass::new(Invariants::new(g2, g3).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn inverse_at_largest_root_is_half_period() {
        let w = Weierstrass::new(Invariants::new(0.01, 0.000144).unwrap()).unwrap();
        let e1 = w.roots().e_tilde[0];
        let z = w.wp_inverse(e1, Branch::Negative).unwrap();
        assert!((z - w.periods().omega1).norm() < 1e-8);
    }

    #[test]
    fn real_round_trip() {
        let w = Weierstrass::new(Invariants::new(0.01, 0.000144).unwrap()).unwrap();
        let z0 = c(0.3, 0.0);
        let target = w.wp(z0).unwrap();
        let z = w.wp_inverse(target, Branch::of(w.wp_prime(z0).unwrap())).unwrap();
        assert!((z - z0).norm() < 1e-12);
        let other = w.wp_inverse(target, Branch::Positive).unwrap();
        assert!((w.wp(other).unwrap() - target).norm() < 1e-10 * target.norm());
        assert!(w.wp_prime(other).unwrap().re > 0.0);
    }

    #[test]
    fn every_real_segment_round_trips() {
        for w in kernels() {
            let e = w.roots().e_tilde;
            let lo = e.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
            let hi = e.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
            let span = (hi - lo).max(0.1);
            for k in 0..41 {
                let target = lo - span + 3.0 * span * k as f64 / 40.0;
                let tw = c(target, 0.0);
                for br in [Branch::Positive, Branch::Negative] {
                    let z = w.wp_inverse(tw, br).unwrap();
                    let v = w.wp(z).unwrap();
                    assert!((v - tw).norm() <= 1e-10 * target.abs().max(1.0), "{target}: {v}");
                    let d = w.wp_prime(z).unwrap();
                    if d.norm() > 1e-6 {
                        assert_eq!(Branch::of(d), br);
                    }
                }
            }
        }
    }

    #[test]
    fn complex_round_trip() {
        for w in kernels() {
            for z0 in [c(0.31, 0.17), c(0.2, -0.4), c(-0.15, 0.05)] {
                let target = w.wp(z0).unwrap();
                let br = Branch::of(w.wp_prime(z0).unwrap());
                let z = w.wp_inverse(target, br).unwrap();
                assert!((w.wp(z).unwrap() - target).norm() <= 1e-10 * target.norm().max(1.0));
                assert_eq!(Branch::of(w.wp_prime(z).unwrap()), br);
            }
        }
    }
}
