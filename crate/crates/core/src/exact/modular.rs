//! Word-size modular arithmetic: Montgomery multiplication for 62-bit
//! primes, a cached prime supply and Chinese remaindering into `BigInt`.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Montgomery context for an odd modulus `p < 2^62`, with `R = 2^64`.
#[derive(Debug, Clone, Copy)]
pub struct Montgomery {
    pub p: u64,
    /// `-p^{-1} mod 2^64`.
    pinv_neg: u64,
    /// `R^2 mod p`.
    r2: u64,
}

impl Montgomery {
    pub fn new(p: u64) -> Self {
        assert!(p % 2 == 1 && p < (1 << 62), "modulus must be odd and below 2^62");
        // Newton iteration for the inverse of p modulo 2^64.
        let mut inv: u64 = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Montgomery {
            p,
            pinv_neg: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.pinv_neg);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn to_mont(&self, x: u64) -> u64 {
        self.mul(x % self.p, self.r2)
    }

    pub fn from_mont(&self, x: u64) -> u64 {
        self.redc(x as u128)
    }

    /// Montgomery image of a signed integer.
    pub fn to_mont_signed(&self, x: i64) -> u64 {
        let r = self.to_mont(x.unsigned_abs());
        if x < 0 {
            self.sub(0, r)
        } else {
            r
        }
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero Montgomery-form element.
    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn prime_cache() -> &'static Mutex<Vec<u64>> {
    static CACHE: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// The first `count` primes below `2^62`, in decreasing order. The supply
/// is extended on demand and cached for the life of the process.
pub fn primes(count: usize) -> Vec<u64> {
    let mut cache = prime_cache().lock().expect("prime cache poisoned");
    let mut cand = cache.last().map_or((1u64 << 62) - 1, |&p| p - 2);
    while cache.len() < count {
        if is_prime(cand) {
            cache.push(cand);
        }
        cand -= 2;
    }
    cache[..count].to_vec()
}

/// Incremental Chinese remaindering with symmetric final lift.
#[derive(Debug, Clone)]
pub struct Crt {
    value: BigInt,
    modulus: BigInt,
}

impl Default for Crt {
    fn default() -> Self {
        Crt {
            value: BigInt::zero(),
            modulus: BigInt::one(),
        }
    }
}

impl Crt {
    pub fn push(&mut self, residue: u64, p: u64) {
        let bp = BigInt::from(p);
        let cur = self.value.mod_floor(&bp).to_u64().expect("residue fits");
        let minv = self.modulus.mod_floor(&bp).to_u64().expect("residue fits");
        let minv = pow_mod(minv, p - 2, p);
        let diff = (residue % p + p - cur) % p;
        let t = mul_mod(diff, minv, p);
        self.value += &self.modulus * BigInt::from(t);
        self.modulus *= bp;
    }

    pub fn modulus_bits(&self) -> f64 {
        log2_biguint(self.modulus.magnitude())
    }

    /// Representative in `(-M/2, M/2]`.
    pub fn symmetric(&self) -> BigInt {
        let half: BigInt = &self.modulus >> 1;
        if self.value > half {
            &self.value - &self.modulus
        } else {
            self.value.clone()
        }
    }
}

/// `log2` of a big unsigned integer in double precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().expect("fits") as f64;
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("fits") as f64;
    top.log2() + shift as f64
}

/// Natural log of `|x|`.
pub fn ln_bigint(x: &BigInt) -> f64 {
    let m = x.abs();
    let bits = m.bits();
    if bits <= 64 {
        return (m.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (m.magnitude() >> shift).to_u64().expect("fits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
