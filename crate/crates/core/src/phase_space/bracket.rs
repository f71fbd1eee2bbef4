use num_complex::Complex64;
use rand::Rng;

use super::poly::{Polynomial, PolySymbol};
use crate::error::{Error, Result};
use crate::numeric::richardson;

/// `{u, v} = sum_i (du/dp_i dv/dq_i - du/dq_i dv/dp_i)`.
///
/// With this sign `{h_0, u}` is the t-derivative of `u(e^t q, e^{-t} p)` at
/// `t = 0`, and `{h_0, |q|^2} = 2 |q|^2`.
pub fn poisson_bracket(u: &PolySymbol, v: &PolySymbol) -> Result<PolySymbol> {
    u.check_same_dim(v)?;
    let n = u.n();
    let mut out = PolySymbol::zero(n);
    for i in 0..n {
        let a = &u.dp(i) * &v.dq(i);
        let b = &u.dq(i) * &v.dp(i);
        out = &out + &(&a - &b);
    }
    Ok(out)
}

pub fn is_constant_of_motion(u: &PolySymbol, h: &PolySymbol) -> Result<bool> {
    Ok(poisson_bracket(h, u)?.is_zero())
}

/// `l_{ij}(q, p) = q_i p_j - q_j p_i` with one-based `1 <= i < j <= n`.
pub fn angular_momentum(i: usize, j: usize, n: usize) -> Result<PolySymbol> {
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::IndexOutOfRange(format!(
            "angular momentum l_({i},{j}) needs 1 <= i < j <= n = {n}"
        )));
    }
    let (i, j) = (i - 1, j - 1);
    Ok(&(&PolySymbol::q(n, i) * &PolySymbol::p(n, j)) - &(&PolySymbol::q(n, j) * &PolySymbol::p(n, i)))
}

/// `a o J`: substitutes the moment-map components into a polynomial in
/// `components.len()` variables.
pub fn moment_map_pushforward(a: &Polynomial, components: &[PolySymbol]) -> Result<PolySymbol> {
    if a.nvars() != components.len() {
        return Err(Error::DimensionMismatch { expected: a.nvars(), found: components.len() });
    }
    let Some(first) = components.first() else {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    };
    for c in components {
        first.check_same_dim(c)?;
    }
    let subs: Vec<Polynomial> = components.iter().map(|c| c.polynomial().clone()).collect();
    PolySymbol::from_polynomial(first.n(), a.substitute(&subs)?)
}

/// The planar constants of motion of `|q|^2` used throughout the checks:
/// `|q|^2, |q|^4, |q|^2 l_12, l_12, l_12^2, (1 + l_12^2) |q|^2`.
pub fn constant_of_motion_battery() -> Vec<(&'static str, PolySymbol)> {
    let h = PolySymbol::norm_q2(2);
    let l = angular_momentum(1, 2, 2).expect("valid indices");
    let l2 = l.pow(2);
    vec![
        ("|q|^2", h.clone()),
        ("|q|^4", h.pow(2)),
        ("|q|^2 l12", &h * &l),
        ("l12", l),
        ("l12^2", l2.clone()),
        ("(1+l12^2)|q|^2", &(&PolySymbol::constant(2, 1.0) + &l2) * &h),
    ]
}

/// Random symbol of total degree at most `max_degree` with a few small
/// integer coefficients, so bracket identities hold in exact arithmetic.
pub fn random_symbol(n: usize, max_degree: u32, terms: usize, rng: &mut impl Rng) -> PolySymbol {
    let mut poly = Polynomial::zero(2 * n);
    for _ in 0..terms {
        let degree = rng.random_range(0..=max_degree);
        let mut exps = vec![0u32; 2 * n];
        for _ in 0..degree {
            exps[rng.random_range(0..2 * n)] += 1;
        }
        let c = Complex64::new(rng.random_range(-3..=3) as f64, rng.random_range(-2..=2) as f64);
        poly.add_term(exps, c);
    }
    PolySymbol::from_polynomial(n, poly).expect("2n variables")
}

/// Largest coefficients of the antisymmetry, Leibniz and Jacobi residuals
/// for `u, v, w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketIdentityDefects {
    pub antisymmetry: f64,
    pub leibniz: f64,
    pub jacobi: f64,
}

impl BracketIdentityDefects {
    pub fn max(&self) -> f64 {
        self.antisymmetry.max(self.leibniz).max(self.jacobi)
    }
}

pub fn bracket_identity_defects(u: &PolySymbol, v: &PolySymbol, w: &PolySymbol) -> Result<BracketIdentityDefects> {
    let b = poisson_bracket;
    let antisymmetry = (&b(u, v)? + &b(v, u)?).max_abs_coeff();
    let leibniz = (&(&b(u, &(v * w))? - &(&b(u, v)? * w)) - &(v * &b(u, w)?)).max_abs_coeff();
    let jacobi = (&(&b(u, &b(v, w)?)? + &b(v, &b(w, u)?)?) + &b(w, &b(u, v)?)?).max_abs_coeff();
    Ok(BracketIdentityDefects { antisymmetry, leibniz, jacobi })
}

/// `|d/dt u(e^t q, e^{-t} p)|_{t=0} - {h_0, u}(q, p)|`, the derivative by
/// central differences with steps `1e-2, 5e-3, 2.5e-3` and Richardson
/// extrapolation.
pub fn flow_generator_defect(u: &PolySymbol, q: &[f64], p: &[f64]) -> Result<f64> {
    let n = u.n();
    if q.len() != n || p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.len().min(p.len()) });
    }
    let generator = poisson_bracket(&PolySymbol::dilation_generator(n), u)?;
    let at = |t: f64| {
        let qs: Vec<f64> = q.iter().map(|x| x * t.exp()).collect();
        let ps: Vec<f64> = p.iter().map(|x| x * (-t).exp()).collect();
        u.eval(&qs, &ps)
    };
    let steps = [1e-2, 5e-3, 2.5e-3];
    let values: Vec<Complex64> = steps.iter().map(|&h| (at(h) - at(-h)) / (2.0 * h)).collect();
    Ok((richardson(&values, &steps, 2) - generator.eval(q, p)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn brute_force_bracket(u: &PolySymbol, v: &PolySymbol) -> PolySymbol {
        // every one of the 2n*2n partial-derivative products, weighted by the
        // canonical Poisson tensor
        let n = u.n();
        let mut acc = PolySymbol::zero(n);
        for a in 0..2 * n {
            for b in 0..2 * n {
                let w = if a >= n && b == a - n {
                    1.0
                } else if a < n && b == a + n {
                    -1.0
                } else {
                    0.0
                };
                if w != 0.0 {
                    let du = PolySymbol::from_polynomial(n, u.polynomial().derivative(a)).unwrap();
                    let dv = PolySymbol::from_polynomial(n, v.polynomial().derivative(b)).unwrap();
                    acc = &acc + &(&du * &dv).scale(w);
                }
            }
        }
        acc
    }

    #[test]
    fn dilation_generator_bracket_with_q_squared() {
        let h0 = PolySymbol::dilation_generator(3);
        let h = PolySymbol::norm_q2(3);
        let b = poisson_bracket(&h0, &h).unwrap();
        assert!((&b - &h.scale(2.0)).is_zero());
    }

    #[test]
    fn bracket_matches_flow_derivative_at_points() {
        let n = 2;
        let h0 = PolySymbol::dilation_generator(n);
        let h = PolySymbol::norm_q2(n);
        let b = poisson_bracket(&h0, &h).unwrap();
        for (q, p) in [([0.3, -1.2], [0.7, 0.1]), ([1.5, 0.4], [-0.2, 2.0])] {
            let eps = 1e-5;
            let f = |t: f64| {
                let qs: Vec<f64> = q.iter().map(|x| x * t.exp()).collect();
                let ps: Vec<f64> = p.iter().map(|x| x * (-t).exp()).collect();
                h.eval(&qs, &ps).re
            };
            let fd = (f(eps) - f(-eps)) / (2.0 * eps);
            assert!((fd - b.eval(&q, &p).re).abs() < 1e-8);
        }
    }

    #[test]
    fn self_bracket_vanishes() {
        let u = &PolySymbol::norm_q2(2) * &angular_momentum(1, 2, 2).unwrap();
        assert!(poisson_bracket(&u, &u).unwrap().is_zero());
    }

    #[test]
    fn dilation_generator_commutes_with_angular_momentum() {
        let h0 = PolySymbol::dilation_generator(2);
        let l = angular_momentum(1, 2, 2).unwrap();
        assert!(poisson_bracket(&h0, &l).unwrap().is_zero());
        assert!(brute_force_bracket(&h0, &l).is_zero());
    }

    #[test]
    fn constants_of_motion_of_q_squared() {
        let h = PolySymbol::norm_q2(2);
        let l = angular_momentum(1, 2, 2).unwrap();
        assert!(is_constant_of_motion(&l, &h).unwrap());
        assert!(!is_constant_of_motion(&PolySymbol::dilation_generator(2), &h).unwrap());
        assert!(is_constant_of_motion(&h, &h).unwrap());
        // the offending term is -2|q|^2
        let b = poisson_bracket(&h, &PolySymbol::dilation_generator(2)).unwrap();
        assert!((&b + &h.scale(2.0)).is_zero());
    }

    #[test]
    fn angular_momentum_components() {
        let l12 = angular_momentum(1, 2, 2).unwrap();
        assert_eq!(l12.eval(&[1.0, 2.0], &[3.0, 5.0]), Complex64::new(1.0 * 5.0 - 2.0 * 3.0, 0.0));
        let l13 = angular_momentum(1, 3, 3).unwrap();
        assert_eq!(
            l13.eval(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]),
            Complex64::new(1.0 * 6.0 - 3.0 * 4.0, 0.0)
        );
        assert!(angular_momentum(2, 2, 3).is_err());
        assert!(angular_momentum(0, 1, 3).is_err());
        assert!(angular_momentum(1, 4, 3).is_err());
        let h = PolySymbol::norm_q2(3);
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            let l = angular_momentum(i, j, 3).unwrap();
            assert!(poisson_bracket(&h, &l).unwrap().is_zero());
        }
    }

    #[test]
    fn brute_force_agrees_with_bracket() {
        let u = &PolySymbol::monomial(&[2, 1], &[1, 0], 1.5).unwrap() + &PolySymbol::p(2, 1).pow(3);
        let v = &PolySymbol::monomial(&[0, 1], &[2, 1], Complex64::new(0.0, 1.0)).unwrap()
            + &PolySymbol::norm_q2(2);
        let diff = &poisson_bracket(&u, &v).unwrap() - &brute_force_bracket(&u, &v);
        assert!(diff.is_zero());
    }

    #[test]
    fn moment_map_pushforward_substitutes() {
        let l = angular_momentum(1, 2, 2).unwrap();
        let a = Polynomial::monomial(vec![2], 1.0);
        let out = moment_map_pushforward(&a, std::slice::from_ref(&l)).unwrap();
        assert!((&out - &(&l * &l)).is_zero());

        let cube = Polynomial::monomial(vec![3], 1.0);
        let out = moment_map_pushforward(&cube, std::slice::from_ref(&l)).unwrap();
        assert!(poisson_bracket(&PolySymbol::norm_q2(2), &out).unwrap().is_zero());
        assert!(poisson_bracket(&PolySymbol::dilation_generator(2), &out).unwrap().is_zero());

        assert!(moment_map_pushforward(&cube, &[l.clone(), l]).is_err());
    }

    #[test]
    fn bracket_rejects_dimension_mismatch() {
        assert!(poisson_bracket(&PolySymbol::q(2, 0), &PolySymbol::q(3, 0)).is_err());
    }

    #[test]
    fn battery_symbols_are_constants_of_motion() {
        let h = PolySymbol::norm_q2(2);
        for (name, u) in constant_of_motion_battery() {
            assert!(is_constant_of_motion(&u, &h).unwrap(), "{name}");
            assert!(u.degree_p() <= 2);
        }
    }

    #[test]
    fn random_triples_satisfy_the_identities() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let [u, v, w] = [0; 3].map(|_| random_symbol(2, 4, 4, &mut rng));
            assert_eq!(bracket_identity_defects(&u, &v, &w).unwrap().max(), 0.0);
        }
    }

    #[test]
    fn flow_generator_at_points() {
        let u = &PolySymbol::norm_q2(2).pow(2) * &angular_momentum(1, 2, 2).unwrap();
        for (q, p) in [([0.3, -1.2], [0.7, 0.1]), ([1.5, 0.4], [-0.2, 2.0])] {
            assert!(flow_generator_defect(&u, &q, &p).unwrap() <= 1e-8);
        }
        let wrong = flow_generator_defect(&PolySymbol::q(2, 0), &[1.0], &[1.0]);
        assert!(matches!(wrong, Err(Error::DimensionMismatch { .. })));
    }
}
