//! Keyed Brownian noise.
//!
//! Every path draws its normals from a Philox4x32-10 counter-based generator
//! keyed by the run seed, with the counter carrying `(level, path, block)`.
//! A draw therefore depends only on `(seed, level, path, index)`, never on
//! which thread produced it or in what order paths were visited.
//!
//! Uniforms are mapped to normals with Wichura's AS241 (PPND16) rational
//! approximation of the inverse normal CDF, relative accuracy about 1e-16.
//! Only `+ - * /`, `ln` and `sqrt` are involved, all of which are correctly
//! rounded or nearly so on every mainstream platform.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
#[inline(always)]
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let p0 = u64::from(PHILOX_M0) * u64::from(c[0]);
        let p1 = u64::from(PHILOX_M1) * u64::from(c[2]);
        c = [
            ((p1 >> 32) as u32) ^ c[1] ^ k[0],
            p1 as u32,
            ((p0 >> 32) as u32) ^ c[3] ^ k[1],
            p0 as u32,
        ];
    }
    c
}

/// SplitMix64 finalizer, used to derive child seeds from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies the independent noise source of one sample path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseStream {
    pub seed: u64,
    pub level: u32,
    pub path: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, level: u32, path: u64) -> Self {
        Self { seed, level, path }
    }

    /// Infinite sequence of standard normal draws for this stream.
    pub fn normals(&self) -> Normals {
        Normals {
            key: [self.seed as u32, (self.seed >> 32) as u32],
            counter: [0, self.path as u32, (self.path >> 32) as u32, self.level],
            pair: [0.0; 2],
            next: 2,
        }
    }
}

/// Iterator over the standard normal draws of a [`NoiseStream`].
#[derive(Debug, Clone)]
pub struct Normals {
    key: [u32; 2],
    counter: [u32; 4],
    pair: [f64; 2],
    next: usize,
}

impl Normals {
    #[inline(always)]
    pub fn next_normal(&mut self) -> f64 {
        if self.next == 2 {
            let block = philox4x32_10(self.counter, self.key);
            self.counter[0] = self.counter[0].wrapping_add(1);
            let first = (u64::from(block[0]) << 32) | u64::from(block[1]);
            let second = (u64::from(block[2]) << 32) | u64::from(block[3]);
            self.pair = [inverse_normal_cdf(open_unit(first)), inverse_normal_cdf(open_unit(second))];
            self.next = 0;
        }
        let z = self.pair[self.next];
        self.next += 1;
        z
    }
}

impl Iterator for Normals {
    type Item = f64;

    #[inline(always)]
    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

/// Top 52 bits mapped to the midpoints of a 2^-52 grid, strictly inside (0, 1).
#[inline(always)]
fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
}

#[inline(always)]
fn horner(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

// Published coefficients, kept digit for digit.
#[allow(clippy::excessive_precision)]
const AS241_A: [f64; 8] = [
    3.387_132_872_796_366_608_0e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
#[allow(clippy::excessive_precision)]
const AS241_B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083_0e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061_0e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561_0e3,
];
#[allow(clippy::excessive_precision)]
const AS241_C: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_90e0,
    5.769_497_221_460_691_405_50e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_70e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_40e-4,
];
#[allow(clippy::excessive_precision)]
const AS241_D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_40e0,
    6.897_673_349_851_000_045_50e-1,
    1.481_039_764_274_800_745_90e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946_00e-4,
    1.050_750_071_644_416_843_24e-9,
];
#[allow(clippy::excessive_precision)]
const AS241_E: [f64; 8] = [
    6.657_904_643_501_103_777_20e0,
    5.463_784_911_164_114_369_90e0,
    1.784_826_539_917_291_335_80e0,
    2.965_605_718_285_048_912_30e-1,
    2.653_218_952_657_612_309_30e-2,
    1.242_660_947_388_078_438_60e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
#[allow(clippy::excessive_precision)]
const AS241_F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_90e-1,
    1.369_298_809_227_358_053_10e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591_00e-4,
    1.846_318_317_510_054_681_80e-5,
    1.421_511_758_316_445_888_70e-7,
    2.044_263_103_389_939_785_64e-15,
];

/// Inverse of the standard normal CDF (Wichura 1988, algorithm AS241).
///
/// `p` must lie in the open interval (0, 1); the endpoints map to infinities.
#[inline]
pub fn inverse_normal_cdf(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * horner(&AS241_A, r) / horner(&AS241_B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    if tail <= 0.0 {
        return if q < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let r = (-tail.ln()).sqrt();
    let magnitude = if r <= 5.0 {
        let r = r - 1.6;
        horner(&AS241_C, r) / horner(&AS241_D, r)
    } else {
        let r = r - 5.0;
        horner(&AS241_E, r) / horner(&AS241_F, r)
    };
    if q < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// Brownian increments `ΔW_n` on a uniform grid of step `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementPath<T> {
    pub dt: T,
    pub values: Vec<T>,
}

impl<T: Scalar> IncrementPath<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time covered by the path, `len · dt`.
    pub fn span(&self) -> T {
        T::of_u64(self.values.len() as u64) * self.dt
    }

    /// `W(t_N) - W(0)`, summed left to right.
    pub fn total(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &dw| acc + dw)
    }
}

/// Scales a standard normal draw to an increment over a step with `sqrt(dt)`.
#[inline(always)]
pub(crate) fn scale_increment<T: Scalar>(sqrt_dt: T, z: f64) -> T {
    sqrt_dt * T::of(z)
}

/// Draws `n_steps` independent `N(0, dt)` increments from `stream`.
pub fn brownian_increments<T: Scalar>(
    n_steps: usize,
    dt: T,
    stream: &NoiseStream,
) -> Result<IncrementPath<T>> {
    if n_steps == 0 {
        return Err(Error::invalid("n_steps", "must be at least 1"));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::invalid("dt", format!("must be positive and finite, got {dt}")));
    }
    let sqrt_dt = dt.sqrt();
    let values = stream
        .normals()
        .take(n_steps)
        .map(|z| scale_increment(sqrt_dt, z))
        .collect();
    Ok(IncrementPath { dt, values })
}

/// Sums consecutive groups of `factor` increments into one coarse increment.
pub fn coarsen_increments<T: Scalar>(
    fine: &IncrementPath<T>,
    factor: u32,
) -> Result<IncrementPath<T>> {
    if factor < 2 {
        return Err(Error::invalid("refinement_factor", format!("must be >= 2, got {factor}")));
    }
    let m = factor as usize;
    if !fine.values.len().is_multiple_of(m) {
        return Err(Error::NotDivisible { len: fine.values.len(), factor });
    }
    let values = fine
        .values
        .chunks_exact(m)
        .map(|group| group.iter().fold(T::zero(), |acc, &dw| acc + dw))
        .collect();
    Ok(IncrementPath { dt: fine.dt * T::of_u64(u64::from(factor)), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0; 4], [0; 2]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn inverse_cdf_reference_points() {
        // scipy.special.ndtri
        let cases = [
            (0.5, 0.0),
            (0.975, 1.959_963_984_540_054),
            (0.025, -1.959_963_984_540_054_5),
            (0.3, -0.524_400_512_708_040_9),
            (1e-10, -6.361_340_902_404_056),
        ];
        for (p, expected) in cases {
            let got = inverse_normal_cdf(p);
            assert!((got - expected).abs() <= 4e-15 * expected.abs().max(1.0), "p={p}: {got}");
        }
        assert_eq!(inverse_normal_cdf(0.0), f64::NEG_INFINITY);
        assert_eq!(inverse_normal_cdf(1.0), f64::INFINITY);
    }

    #[test]
    fn inverse_cdf_is_odd_and_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..2000 {
            let p = i as f64 / 2000.0;
            let z = inverse_normal_cdf(p);
            assert!(z > prev);
            prev = z;
            assert!((z + inverse_normal_cdf(1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn open_unit_never_hits_endpoints() {
        assert!(open_unit(0) > 0.0);
        assert!(open_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn streams_are_deterministic_and_keyed() {
        let a = brownian_increments::<f64>(4, 0.25, &NoiseStream::new(7, 0, 0)).unwrap();
        let b = brownian_increments::<f64>(4, 0.25, &NoiseStream::new(7, 0, 0)).unwrap();
        assert_eq!(a, b);
        let other_path = brownian_increments::<f64>(4, 0.25, &NoiseStream::new(7, 0, 1)).unwrap();
        let other_level = brownian_increments::<f64>(4, 0.25, &NoiseStream::new(7, 1, 0)).unwrap();
        let other_seed = brownian_increments::<f64>(4, 0.25, &NoiseStream::new(8, 0, 0)).unwrap();
        assert_ne!(a, other_path);
        assert_ne!(a, other_level);
        assert_ne!(a, other_seed);
    }

    #[test]
    fn odd_length_prefix_matches_longer_draw() {
        let short = brownian_increments::<f64>(3, 0.1, &NoiseStream::new(1, 2, 3)).unwrap();
        let long = brownian_increments::<f64>(8, 0.1, &NoiseStream::new(1, 2, 3)).unwrap();
        assert_eq!(short.values[..], long.values[..3]);
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = NoiseStream::new(0, 0, 0);
        assert!(brownian_increments::<f64>(0, 0.25, &s).is_err());
        assert!(brownian_increments::<f64>(4, 0.0, &s).is_err());
        assert!(brownian_increments::<f64>(4, -1.0, &s).is_err());
        assert!(brownian_increments::<f64>(4, f64::NAN, &s).is_err());
    }

    #[test]
    fn coarsen_pairs() {
        let fine = IncrementPath { dt: 0.25, values: vec![1.0, 2.0, 3.0, 4.0] };
        let coarse = coarsen_increments(&fine, 2).unwrap();
        assert_eq!(coarse, IncrementPath { dt: 0.5, values: vec![3.0, 7.0] });
        let odd = IncrementPath { dt: 0.2, values: vec![1.0; 5] };
        assert_eq!(
            coarsen_increments(&odd, 2),
            Err(Error::NotDivisible { len: 5, factor: 2 })
        );
        assert!(coarsen_increments(&fine, 1).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        let c = derive_seed(43, 0);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, derive_seed(42, 0));
    }
}
