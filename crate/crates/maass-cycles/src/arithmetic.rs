//! Elementary number theory: Kronecker symbols, fundamental discriminants,
//! multiplicative functions, and the exponential sums that drive everything
//! else here.
//!
//! The half-integral-weight Kloosterman sum [`kloosterman_plus`] is the
//! arithmetic heart of the crate: its Dirichlet series in the modulus is
//! proportional to L(s, χ_d)/ζ(2s), and the harness checks exactly that.
//! All symbols follow the classical conventions: ε_d = 1 for d ≡ 1 (mod 4)
//! and ε_d = i for d ≡ 3 (mod 4); the Kronecker symbol extends Jacobi by
//! (a/2) = 0, ±1 according to a mod 8 and (a/−1) = sgn a.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArithmeticError {
    #[error("not a fundamental discriminant: {0}")]
    NotFundamental(i64),
    #[error("modulus must be a positive multiple of 4, got {0}")]
    BadPlusModulus(u64),
    #[error("modulus must be positive, got {0}")]
    BadModulus(u64),
}

/// Jacobi symbol (a/n) for odd positive n, by the binary algorithm.
fn jacobi(a: i64, n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a/n), total on all integer pairs.
///
/// For a fundamental discriminant d, `kronecker(d, n)` is the quadratic
/// character χ_d(n): completely multiplicative, periodic mod |d|, with
/// χ_d(−1) = sgn d.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    result * jacobi(a, n)
}

/// ε_d for odd d: 1 if d ≡ 1 (mod 4), i if d ≡ 3 (mod 4).
pub fn epsilon_factor(d: i64) -> Complex64 {
    debug_assert!(d % 2 != 0);
    if d.rem_euclid(4) == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// True for fundamental discriminants: d ≡ 1 (mod 4) and squarefree, or
/// d = 4m with m squarefree and m ≡ 2, 3 (mod 4). Includes d = 1.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A validated fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self, ArithmeticError> {
        if is_fundamental_discriminant(d) {
            Ok(Discriminant(d))
        } else {
            Err(ArithmeticError::NotFundamental(d))
        }
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// χ_d(n) as the Kronecker symbol (d/n).
    pub fn chi(self, n: i64) -> i32 {
        kronecker(self.0, n)
    }
}

impl std::fmt::Display for Discriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Extended Euclid: returns (g, x, y) with a·x + b·y = g = gcd(a, b) ≥ 0.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Inverse of a mod m (m > 1), if gcd(a, m) = 1.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    debug_assert!(m > 1);
    let (g, x, _) = extended_gcd(a.rem_euclid(m), m);
    if g == 1 {
        Some(x.rem_euclid(m))
    } else {
        None
    }
}

/// Prime factorization by trial division, adequate for the moduli used here.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// All positive divisors of n, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// σ_ν(n) = Σ_{m | n} m^ν with complex exponent, by multiplicativity.
pub fn divisor_sigma(nu: Complex64, n: u64) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for (p, e) in factorize(n) {
        let lp = (p as f64).ln();
        let mut local = Complex64::new(1.0, 0.0);
        for j in 1..=e {
            local += (nu * (j as f64) * lp).exp();
        }
        out *= local;
    }
    out
}

/// Classical Kloosterman sum S(m, n; c) = Σ_{d (c)*} e((md + n d̄)/c).
///
/// Real by the d ↔ −d symmetry; computed as the cosine sum directly.
pub fn kloosterman(m: i64, n: i64, c: u64) -> Result<f64, ArithmeticError> {
    if c == 0 {
        return Err(ArithmeticError::BadModulus(c));
    }
    if c == 1 {
        return Ok(1.0);
    }
    let ci = c as i64;
    let step = 2.0 * PI / c as f64;
    let mut sum = 0.0f64;
    for d in 1..ci {
        if let Some(dbar) = mod_inverse(d, ci) {
            let phase = (m.rem_euclid(ci) * d + n.rem_euclid(ci) * dbar).rem_euclid(ci);
            sum += (step * phase as f64).cos();
        }
    }
    Ok(sum)
}

/// Half-integral-weight Kloosterman sum for 4 | c:
///
///   K⁺(p, q; c) = (1 − i)·(1 + δ_odd(c/4))·Σ_{d (c)*} (c/d) ε_d e((p d̄ + q d)/c),
///
/// where δ_odd(x) is 1 for odd x and 0 otherwise, and the sum runs over the
/// (automatically odd) units d mod c. The value is real and symmetric in
/// p ↔ q; the function returns the real part after the imaginary part has
/// been checked to be quadrature-exact noise.
pub fn kloosterman_plus(p: i64, q: i64, c: u64) -> Result<f64, ArithmeticError> {
    if c == 0 || c % 4 != 0 {
        return Err(ArithmeticError::BadPlusModulus(c));
    }
    let ci = c as i64;
    let step = 2.0 * PI / c as f64;
    let pm = p.rem_euclid(ci);
    let qm = q.rem_euclid(ci);
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    for d in (1..ci).step_by(2) {
        let jac = kronecker(ci, d);
        if jac == 0 {
            continue;
        }
        // When one index vanishes, replace the summation variable by its
        // inverse: d ↦ d̄ permutes the odd units, fixes ε_d (d d̄ ≡ 1 mod 4
        // forces d̄ ≡ d mod 4), and fixes (c/d) because (c/·) is a real
        // character mod c for 4 | c. This turns p d̄ into p d and removes
        // the modular inversion from the inner loop.
        let phase = if pm == 0 {
            (qm * d).rem_euclid(ci)
        } else if qm == 0 {
            (pm * d).rem_euclid(ci)
        } else {
            // jac != 0 guarantees gcd(d, c) = 1, so the inverse exists
            let dbar = mod_inverse(d, ci).expect("unit has an inverse");
            (pm * dbar + qm * d).rem_euclid(ci)
        };
        let theta = step * phase as f64;
        let (s, co) = theta.sin_cos();
        // multiply e(θ) by ε_d ∈ {1, i}
        if d % 4 == 1 {
            re += jac as f64 * co;
            im += jac as f64 * s;
        } else {
            re -= jac as f64 * s;
            im += jac as f64 * co;
        }
    }
    let mult = if (c / 4) % 2 == 1 { 2.0 } else { 1.0 };
    // (1 − i)(re + i·im) = (re + im) + i(im − re)
    let value = mult * (re + im);
    let residue = mult * (im - re);
    debug_assert!(
        residue.abs() <= 1e-7 * (1.0 + value.abs() + c as f64),
        "K+({p},{q};{c}) lost realness: {value} + {residue}i"
    );
    Ok(value)
}

/// Smallest-prime-factor table for the moduli handled by [`PlusZeroEvaluator`].
///
/// `table[n]` holds the least prime dividing n (and n itself when n is
/// prime); entries 0 and 1 are 0. Built once by an Eratosthenes-style sieve
/// and shared read-only across evaluations.
pub struct SmallestPrimeFactors {
    table: Vec<u32>,
}

impl SmallestPrimeFactors {
    /// Sieve the factor table for all n ≤ limit.
    pub fn up_to(limit: u64) -> SmallestPrimeFactors {
        let n = limit as usize;
        let mut table = vec![0u32; n + 1];
        for i in 2..=n {
            if table[i] == 0 {
                for j in (i..=n).step_by(i) {
                    if table[j] == 0 {
                        table[j] = i as u32;
                    }
                }
            }
        }
        SmallestPrimeFactors { table }
    }

    /// Largest n the table covers.
    pub fn limit(&self) -> u64 {
        (self.table.len() - 1) as u64
    }
}

/// Batch evaluator for the zero-index sums K⁺(p, 0; c).
///
/// Inverting the summation variable (valid as in [`kloosterman_plus`]) gives
///
///   K⁺(p, 0; c) = (1 − i)·(1 + δ_odd(c/4))·Σ_{u (c)*} (c/u) ε_u e(pu/c),
///
/// and for fixed c the symbol (c/·) is a completely multiplicative function
/// of the odd argument, so one smallest-prime-factor sweep fills the whole
/// character table with a Kronecker evaluation per prime ≤ c instead of one
/// per term. The evaluator reuses its scratch table across calls; summing
/// K⁺(p, 0; 4c) over c ≤ C this way costs O(C²/log C) instead of the
/// O(C² log C) of termwise [`kloosterman_plus`] calls.
pub struct PlusZeroEvaluator<'a> {
    spf: &'a SmallestPrimeFactors,
    // chi[u >> 1] = (c/u) for odd u < c, rebuilt per modulus
    chi: Vec<i8>,
}

impl<'a> PlusZeroEvaluator<'a> {
    pub fn new(spf: &'a SmallestPrimeFactors) -> PlusZeroEvaluator<'a> {
        PlusZeroEvaluator {
            spf,
            chi: Vec::new(),
        }
    }

    /// K⁺(p, 0; c) for 4 | c ≤ the sieve limit; other moduli are rejected.
    pub fn eval(&mut self, p: i64, c: u64) -> Result<f64, ArithmeticError> {
        if c == 0 || c % 4 != 0 || c > self.spf.limit() {
            return Err(ArithmeticError::BadPlusModulus(c));
        }
        let ci = c as i64;
        let half = (c / 2) as usize;
        self.chi.resize(half, 0);
        self.chi[0] = 1;
        for idx in 1..half {
            let u = 2 * idx + 1;
            let f = self.spf.table[u] as usize;
            self.chi[idx] = if f == u {
                kronecker(ci, u as i64) as i8
            } else {
                // odd u factors as f · (u/f) with both parts odd and smaller
                self.chi[f >> 1] * self.chi[(u / f) >> 1]
            };
        }
        let step = 2.0 * PI / c as f64;
        let pm = p.rem_euclid(ci);
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for (idx, &jac) in self.chi.iter().enumerate() {
            if jac == 0 {
                continue;
            }
            let u = (2 * idx + 1) as i64;
            let theta = step * ((pm * u) % ci) as f64;
            let (s, co) = theta.sin_cos();
            // ε_u is 1 for u ≡ 1 mod 4 (even idx), i for u ≡ 3 mod 4
            if idx & 1 == 0 {
                re += jac as f64 * co;
                im += jac as f64 * s;
            } else {
                re -= jac as f64 * s;
                im += jac as f64 * co;
            }
        }
        let mult = if (c / 4) % 2 == 1 { 2.0 } else { 1.0 };
        // (1 − i)(re + i·im) = (re + im) + i(im − re)
        let value = mult * (re + im);
        let residue = mult * (im - re);
        debug_assert!(
            residue.abs() <= 1e-7 * (1.0 + value.abs() + c as f64),
            "K+({p},0;{c}) lost realness: {value} + {residue}i"
        );
        Ok(value)
    }
}

/// Gauss sum of the quadratic character in closed form:
///
///   Σ_{a mod |d|} χ_d(a) e(na/|d|) = χ_d(n) √|d| · (1 for d > 0, i for d < 0).
pub fn gauss_sum(n: i64, d: Discriminant) -> Complex64 {
    let unit = if d.is_positive() {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    (d.chi(n) as f64) * (d.abs() as f64).sqrt() * unit
}
