//! Truncated Taylor-series (jet) arithmetic.
//!
//! Jets carry Taylor coefficients `c_k = f^(k)(x0) / k!` up to a fixed
//! order; composing elementary operations on them yields machine-accurate
//! derivatives of composite expressions, which is how the fooling-bump
//! construction gets the derivatives of `phi(t) w^{-1}(x)` without
//! symbolic algebra or finite differences.

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    /// Taylor coefficients, index = order.
    pub c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity t -> t expanded at t0.
    pub fn variable(t0: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = t0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    /// k-th derivative value: k! * c_k.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0f64;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let mut c = self.c.clone();
        for (a, b) in c.iter_mut().zip(other.c.iter()) {
            *a += b;
        }
        Jet { c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.c[j] * other.c[k - j];
            }
            c[k] = acc;
        }
        Jet { c }
    }

    /// 1 / self; requires c_0 != 0.
    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        c[0] = 1.0 / self.c[0];
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.c[j] * c[k - j];
            }
            c[k] = -acc / self.c[0];
        }
        Jet { c }
    }

    /// exp(self), by the standard ODE recurrence
    /// `k y_k = sum_{j=1}^{k} j u_j y_{k-j}`.
    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        c[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = acc / k as f64;
        }
        Jet { c }
    }

    /// Jet of x -> x^p at x0 > 0 (binomial series in closed form).
    pub fn power(x0: f64, p: f64, order: usize) -> Jet {
        assert!(x0 > 0.0, "power jet needs a positive expansion point");
        let mut c = vec![0.0; order + 1];
        let mut coef = x0.powf(p);
        c[0] = coef;
        let mut falling = 1.0f64;
        for k in 1..=order {
            falling *= (p - (k as f64 - 1.0)) / k as f64;
            coef = x0.powf(p - k as f64);
            c[k] = falling * coef;
        }
        Jet { c }
    }
}
