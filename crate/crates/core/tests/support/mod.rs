//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use qrfsj::dataset::Dataset;

/// Bundled 17-season example table.
pub fn bundled_csv() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_yield.csv")
}

/// Non-negative finite double as an integer count of 2^-1074.
fn to_units(x: f64) -> BigUint {
    assert!(x >= 0.0 && x.is_finite());
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as u32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        BigUint::from(frac)
    } else {
        BigUint::from(frac | (1u64 << 52)) << (exp - 1)
    }
}

/// Sum of non-negative doubles, computed exactly and rounded once
/// (round half to even).
pub fn exact_sum_rounded(values: &[f64]) -> f64 {
    let total: BigUint = values.iter().map(|&v| to_units(v)).sum();
    if total.is_zero() {
        return 0.0;
    }
    let bits = total.bits();
    if bits <= 53 {
        return total.to_f64().unwrap() * f64::from_bits(1);
    }
    let shift = bits - 53;
    let mut q: BigUint = &total >> shift;
    let rem = &total - (&q << shift);
    let half = BigUint::from(1u8) << (shift - 1);
    if rem > half || (rem == half && q.bit(0)) {
        q += 1u8;
    }
    let q = q.to_f64().unwrap();
    let e = shift as i64 - 1074;
    assert!(e > -1022 && e < 1000, "scale outside the normal range");
    q * f64::from_bits(((1023 + e) as u64) << 52)
}

/// Random data set on `[0,1]^m` with index years.
pub fn dataset(features: Vec<Vec<f64>>, target: Vec<f64>) -> Dataset {
    let m = features[0].len();
    let names = (0..m).map(|j| format!("x{j}")).collect();
    Dataset::with_index_years(names, features, target).unwrap()
}
