// Bivariate normal probabilities after Drezner & Wesolowsky, with Genz's
// double-precision refinements for |r| close to one.

use crate::error::{PricingError, Result};
use crate::math::{abs, asin, exp, sin, sqrt};

use super::cdf;

const TWO_PI: f64 = core::f64::consts::TAU;

// Gauss-Legendre half rules (weights, positive nodes) for n = 6, 12, 20.
const GL6: [(f64, f64); 3] = [
    (0.171_324_492_379_170_5, 0.932_469_514_203_152_2),
    (0.360_761_573_048_138_4, 0.661_209_386_466_264_7),
    (0.467_913_934_572_690_4, 0.238_619_186_083_197_0),
];

const GL12: [(f64, f64); 6] = [
    (0.047_175_336_386_511_77, 0.981_560_634_246_719_1),
    (0.106_939_325_995_318_3, 0.904_117_256_370_475_0),
    (0.160_078_328_543_346_4, 0.769_902_674_194_305_0),
    (0.203_167_426_723_065_9, 0.587_317_954_286_617_1),
    (0.233_492_536_538_354_7, 0.367_831_498_998_180_2),
    (0.249_147_045_813_402_9, 0.125_233_408_511_469_2),
];

const GL20: [(f64, f64); 10] = [
    (0.017_614_007_139_152_12, 0.993_128_599_185_094_9),
    (0.040_601_429_800_386_94, 0.963_971_927_277_913_8),
    (0.062_672_048_334_109_06, 0.912_234_428_251_325_9),
    (0.083_276_741_576_704_75, 0.839_116_971_822_218_8),
    (0.101_930_119_817_240_4, 0.746_331_906_460_150_8),
    (0.118_194_531_961_518_4, 0.636_053_680_726_515_0),
    (0.131_688_638_449_176_6, 0.510_867_001_950_827_1),
    (0.142_096_109_318_382_1, 0.373_706_088_715_419_6),
    (0.149_172_986_472_603_7, 0.227_785_851_141_645_1),
    (0.152_753_387_130_725_9, 0.076_526_521_133_497_33),
];

/// `P(Y0 <= a, Y1 <= b)` for a standard bivariate normal with correlation
/// `rho`. `|rho| = 1` is resolved exactly.
pub fn binorm_cdf(a: f64, b: f64, rho: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(PricingError::invalid("limit", "NaN"));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(PricingError::invalid("rho", "must lie in [-1, 1]"));
    }
    Ok(bvn_lower(a, b, rho))
}

/// Unchecked lower-orthant probability.
pub(crate) fn bvn_lower(a: f64, b: f64, rho: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return 0.0;
    }
    if a == f64::INFINITY {
        return cdf(b);
    }
    if b == f64::INFINITY {
        return cdf(a);
    }
    if rho >= 1.0 {
        return cdf(a.min(b));
    }
    if rho <= -1.0 {
        return (cdf(a) - cdf(-b)).max(0.0);
    }
    bvnu(-a, -b, rho)
}

// Upper orthant P(Y0 > h, Y1 > k).
fn bvnu(h: f64, k: f64, r: f64) -> f64 {
    if r == 0.0 {
        return cdf(-h) * cdf(-k);
    }
    let ar = abs(r);
    let rule: &[(f64, f64)] = if ar < 0.3 {
        &GL6
    } else if ar < 0.75 {
        &GL12
    } else {
        &GL20
    };
    let mut k = k;
    let mut hk = h * k;
    let mut bvn = 0.0;

    if ar < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = 0.5 * asin(r);
        for &(w, x) in rule {
            for node in [1.0 - x, 1.0 + x] {
                let sn = sin(asr * node);
                bvn += w * exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return (bvn * asr / TWO_PI + cdf(-h) * cdf(-k)).clamp(0.0, 1.0);
    }

    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    let as_ = (1.0 - r) * (1.0 + r);
    let mut a = sqrt(as_);
    let bs = (h - k) * (h - k);
    let c = (4.0 - hk) / 8.0;
    let d = (12.0 - hk) / 80.0;
    let asr = -0.5 * (bs / as_ + hk);
    if asr > -100.0 {
        bvn = a * exp(asr) * (1.0 - c * (bs - as_) * (1.0 - d * bs) / 3.0 + c * d * as_ * as_);
    }
    if hk > -100.0 {
        let b = sqrt(bs);
        let sp = sqrt(TWO_PI) * cdf(-b / a);
        bvn -= exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a *= 0.5;
    let mut sum = 0.0;
    for &(w, x) in rule {
        for node in [1.0 - x, 1.0 + x] {
            let xs = (a * node) * (a * node);
            let asr = -0.5 * (bs / xs + hk);
            if asr > -100.0 {
                let sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                let rs = sqrt(1.0 - xs);
                let ep = exp(-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
                sum += w * exp(asr) * (sp - ep);
            }
        }
    }
    bvn = (a * sum - bvn) / TWO_PI;

    let out = if r > 0.0 {
        bvn + cdf(-h.max(k))
    } else if h >= k {
        -bvn
    } else {
        let l = if h < 0.0 {
            cdf(k) - cdf(h)
        } else {
            cdf(-h) - cdf(-k)
        };
        l - bvn
    };
    out.clamp(0.0, 1.0)
}
