//! Image quality measures.
//!
//! Full-reference: MSE, PSNR and SSIM. No-reference visibility descriptors
//! comparing a restored image with its hazy input: the new-visible-edge
//! ratio `e`, the newly-saturated fraction `sigma` and the geometric mean
//! gradient gain `rbar`. Plus the mean squared contrast used as a dehazing
//! diagnostic.

use crate::error::{Error, Result};
use crate::image::{ColorImage, Plane};

/// Default visible-edge threshold on the normalised Sobel magnitude.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 0.05;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceReport {
    pub mse: f64,
    /// `f64::INFINITY` for identical images.
    pub psnr: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityReport {
    pub e: f64,
    pub sigma: f64,
    pub rbar: f64,
}

/// Mean squared difference over every pixel and channel.
pub fn mse(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    reference.ensure_same_dims(test)?;
    let mut total = 0.0;
    for c in 0..3 {
        total += reference
            .channel(c)
            .values()
            .iter()
            .zip(test.channel(c).values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    Ok(total / (3 * reference.channel(0).len()) as f64)
}

/// `10 log10(1 / mse)` for unit-range images.
pub fn psnr(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(reference, test)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    for (i, v) in k.iter_mut().enumerate() {
        let x = i as f64 - half;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.map(|v| v / sum)
}

/// Separable "valid" filtering: output shrinks by `SSIM_WINDOW - 1` per axis.
fn filter_valid(plane: &Plane, kernel: &[f64; SSIM_WINDOW]) -> Plane {
    let (rows, cols) = plane.dims();
    let ocols = cols - SSIM_WINDOW + 1;
    let orows = rows - SSIM_WINDOW + 1;
    let horiz = Plane::from_fn(rows, ocols, |r, c| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, w)| w * plane.get(r, c + k))
            .sum()
    });
    Plane::from_fn(orows, ocols, |r, c| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, w)| w * horiz.get(r + k, c))
            .sum()
    })
}

/// Mean SSIM on BT.601 luma with an 11x11 Gaussian window (sigma 1.5) and
/// dynamic range 1.
pub fn ssim(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    reference.ensure_same_dims(test)?;
    let (rows, cols) = reference.dims();
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::TooSmall {
            rows,
            cols,
            min_rows: SSIM_WINDOW,
            min_cols: SSIM_WINDOW,
        });
    }
    let x = reference.luma();
    let y = test.luma();
    let kernel = gaussian_kernel();
    let mu_x = filter_valid(&x, &kernel);
    let mu_y = filter_valid(&y, &kernel);
    let xx = filter_valid(&x.map(|v| v * v), &kernel);
    let yy = filter_valid(&y.map(|v| v * v), &kernel);
    let xy = filter_valid(&x.zip_map(&y, |a, b| a * b)?, &kernel);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let n = mu_x.len();
    let mut total = 0.0;
    for i in 0..n {
        let (mx, my) = (mu_x.values()[i], mu_y.values()[i]);
        let sx = xx.values()[i] - mx * mx;
        let sy = yy.values()[i] - my * my;
        let sxy = xy.values()[i] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * sxy + c2))
            / ((mx * mx + my * my + c1) * (sx + sy + c2));
    }
    Ok(total / n as f64)
}

pub fn reference_report(reference: &ColorImage, test: &ColorImage) -> Result<ReferenceReport> {
    let mse = mse(reference, test)?;
    Ok(ReferenceReport {
        mse,
        psnr: psnr_from_mse(mse),
        ssim: ssim(reference, test)?,
    })
}

/// Sobel gradient magnitude with replicated borders, scaled by 1/4 so a unit
/// step edge has magnitude 1.
pub fn sobel_magnitude(plane: &Plane) -> Plane {
    let (rows, cols) = plane.dims();
    let at = |r: isize, c: isize| {
        plane.get(
            r.clamp(0, rows as isize - 1) as usize,
            c.clamp(0, cols as isize - 1) as usize,
        )
    };
    Plane::from_fn(rows, cols, |r, c| {
        let (r, c) = (r as isize, c as isize);
        let gx = (at(r - 1, c + 1) + 2.0 * at(r, c + 1) + at(r + 1, c + 1))
            - (at(r - 1, c - 1) + 2.0 * at(r, c - 1) + at(r + 1, c - 1));
        let gy = (at(r + 1, c - 1) + 2.0 * at(r + 1, c) + at(r + 1, c + 1))
            - (at(r - 1, c - 1) + 2.0 * at(r - 1, c) + at(r - 1, c + 1));
        0.25 * gx.hypot(gy)
    })
}

fn saturated(px: [f64; 3]) -> bool {
    px.iter().any(|&v| v <= 0.0 || v >= 1.0)
}

/// Visibility descriptors of `restored` relative to `hazy`, computed on luma
/// with visible edges where the Sobel magnitude exceeds `threshold`.
///
/// With no visible edge in `hazy`, `e` is 0 if `restored` has none either and
/// `+inf` otherwise. With no visible edge in `restored`, `rbar` is 1.
pub fn hautiere(hazy: &ColorImage, restored: &ColorImage, threshold: f64) -> Result<VisibilityReport> {
    hazy.ensure_same_dims(restored)?;
    let g_hazy = sobel_magnitude(&hazy.luma());
    let g_restored = sobel_magnitude(&restored.luma());

    let n_o = g_hazy.values().iter().filter(|&&g| g > threshold).count();
    let mut n_r = 0usize;
    let mut log_sum = 0.0;
    for (&gr, &gh) in g_restored.values().iter().zip(g_hazy.values()) {
        if gr > threshold {
            n_r += 1;
            log_sum += (gr / gh.max(1e-6)).ln();
        }
    }

    let e = match (n_o, n_r) {
        (0, 0) => 0.0,
        (0, _) => f64::INFINITY,
        _ => (n_r as f64 - n_o as f64) / n_o as f64,
    };

    let (rows, cols) = hazy.dims();
    let mut n_s = 0usize;
    for r in 0..rows {
        for c in 0..cols {
            if saturated(restored.pixel(r, c)) && !saturated(hazy.pixel(r, c)) {
                n_s += 1;
            }
        }
    }
    let sigma = n_s as f64 / (rows * cols) as f64;
    let rbar = if n_r == 0 {
        1.0
    } else {
        (log_sum / n_r as f64).exp()
    };
    Ok(VisibilityReport { e, sigma, rbar })
}

/// Sum over channels of the per-channel variance.
pub fn contrast_ms(image: &ColorImage) -> f64 {
    image
        .channels()
        .iter()
        .map(|p| {
            let m = p.mean();
            p.values().iter().map(|v| (v - m) * (v - m)).sum::<f64>() / p.len() as f64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gray(plane: Plane) -> ColorImage {
        ColorImage::new([plane.clone(), plane.clone(), plane]).unwrap()
    }

    fn texture(seed: u64, rows: usize, cols: usize) -> ColorImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ColorImage::from_fn(rows, cols, |r, c| {
            let base = 0.5 + 0.25 * ((r as f64 * 0.7).sin() * (c as f64 * 0.45).cos());
            let v = (base + rng.gen_range(-0.1..0.1)).clamp(0.0, 1.0);
            [v, (v * 0.9).min(1.0), (1.1 * v).min(1.0)]
        })
        .unwrap()
    }

    /// Per-window SSIM evaluated directly from the definition.
    fn ssim_naive(x: &Plane, y: &Plane) -> f64 {
        let half = 5isize;
        let w: Vec<f64> = (-half..=half)
            .map(|i| (-(i * i) as f64 / (2.0 * 1.5 * 1.5)).exp())
            .collect();
        let ws: f64 = w.iter().sum();
        let (rows, cols) = x.dims();
        let (c1, c2) = (1e-4, 9e-4);
        let mut total = 0.0;
        let mut count = 0;
        for r in 5..rows - 5 {
            for c in 5..cols - 5 {
                let (mut mx, mut my, mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for i in 0..11 {
                    for j in 0..11 {
                        let k = w[i] * w[j] / (ws * ws);
                        let a = x.get(r + i - 5, c + j - 5);
                        let b = y.get(r + i - 5, c + j - 5);
                        mx += k * a;
                        my += k * b;
                    }
                }
                for i in 0..11 {
                    for j in 0..11 {
                        let k = w[i] * w[j] / (ws * ws);
                        let a = x.get(r + i - 5, c + j - 5) - mx;
                        let b = y.get(r + i - 5, c + j - 5) - my;
                        vx += k * a * a;
                        vy += k * b * b;
                        cxy += k * a * b;
                    }
                }
                total += (2.0 * mx * my + c1) * (2.0 * cxy + c2)
                    / ((mx * mx + my * my + c1) * (vx + vy + c2));
                count += 1;
            }
        }
        total / count as f64
    }

    #[test]
    fn mse_examples() {
        let a = texture(1, 8, 8);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        let zeros = ColorImage::filled(4, 4, [0.0; 3]).unwrap();
        let ones = ColorImage::filled(4, 4, [1.0; 3]).unwrap();
        assert_eq!(mse(&zeros, &ones).unwrap(), 1.0);
        let half = ColorImage::from_fn(4, 4, |r, _| if r < 2 { [0.5; 3] } else { [0.0; 3] }).unwrap();
        assert_eq!(mse(&zeros, &half).unwrap(), 0.125);
        assert!(mse(&zeros, &ColorImage::filled(4, 5, [0.0; 3]).unwrap()).is_err());
    }

    #[test]
    fn mse_symmetric_and_positive() {
        let a = texture(2, 12, 9);
        let b = texture(3, 12, 9);
        let ab = mse(&a, &b).unwrap();
        assert_eq!(ab, mse(&b, &a).unwrap());
        assert!(ab > 0.0);
    }

    #[test]
    fn psnr_examples() {
        assert!((psnr_from_mse(0.01) - 20.0).abs() < 1e-12);
        assert_eq!(psnr_from_mse(1.0), 0.0);
        let a = texture(4, 8, 8);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
    }

    #[test]
    fn ssim_identical_is_one() {
        let a = texture(5, 24, 20);
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ssim_matches_direct_evaluation() {
        let a = texture(6, 20, 23);
        let b = texture(7, 20, 23);
        let fast = ssim(&a, &b).unwrap();
        let slow = ssim_naive(&a.luma(), &b.luma());
        assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
    }

    #[test]
    fn ssim_negative_image_is_low() {
        let a = texture(8, 32, 32);
        let neg = ColorImage::new(a.channels().clone().map(|p| p.map(|v| 1.0 - v))).unwrap();
        let s = ssim(&a, &neg).unwrap();
        assert!(s < 0.5, "{s}");
        assert!((s - ssim_naive(&a.luma(), &neg.luma())).abs() < 1e-10);
    }

    #[test]
    fn ssim_constant_offset_closed_form() {
        let c = 0.4;
        let a = ColorImage::filled(16, 16, [c; 3]).unwrap();
        let b = ColorImage::filled(16, 16, [c + 0.1; 3]).unwrap();
        let c1 = 1e-4;
        let expected = (2.0 * c * (c + 0.1) + c1) / (c * c + (c + 0.1) * (c + 0.1) + c1);
        assert!((ssim(&a, &b).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn ssim_too_small() {
        let a = ColorImage::filled(10, 20, [0.5; 3]).unwrap();
        assert!(matches!(ssim(&a, &a), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn hautiere_self_comparison() {
        let a = texture(9, 30, 30);
        let rep = hautiere(&a, &a, DEFAULT_EDGE_THRESHOLD).unwrap();
        assert_eq!(rep, VisibilityReport { e: 0.0, sigma: 0.0, rbar: 1.0 });
    }

    #[test]
    fn hautiere_contrast_doubling() {
        let hazy = gray(Plane::from_fn(24, 24, |r, c| {
            0.5 + 0.2 * ((r / 4 + c / 6) % 2) as f64 - 0.1
        }));
        let doubled = gray(hazy.channel(0).map(|v| 2.0 * (v - 0.5) + 0.5));
        let rep = hautiere(&hazy, &doubled, DEFAULT_EDGE_THRESHOLD).unwrap();
        assert!((rep.rbar - 2.0).abs() < 1e-6);
        assert!(rep.e >= 0.0);
        assert_eq!(rep.sigma, 0.0);
    }

    #[test]
    fn hautiere_black_output_is_fully_saturated() {
        let hazy = texture(10, 16, 16);
        let black = ColorImage::filled(16, 16, [0.0; 3]).unwrap();
        let rep = hautiere(&hazy, &black, DEFAULT_EDGE_THRESHOLD).unwrap();
        assert_eq!(rep.sigma, 1.0);
    }

    #[test]
    fn hautiere_e_invariant_under_consistent_channel_swap() {
        // luma weights differ per channel, so the swap is only neutral when
        // the swapped channels carry the same content
        let a = texture(11, 20, 20);
        let b = texture(12, 20, 20);
        let ga = gray(a.channel(0).clone());
        let gb = gray(b.channel(0).clone());
        let swap = |img: &ColorImage| {
            let [r, g, b] = img.channels().clone();
            ColorImage::new([b, r, g]).unwrap()
        };
        assert_eq!(
            hautiere(&ga, &gb, DEFAULT_EDGE_THRESHOLD).unwrap(),
            hautiere(&swap(&ga), &swap(&gb), DEFAULT_EDGE_THRESHOLD).unwrap()
        );
    }

    #[test]
    fn sobel_unit_step() {
        let step = Plane::from_fn(5, 6, |_, c| if c < 3 { 0.0 } else { 1.0 });
        let g = sobel_magnitude(&step);
        assert!((g.get(2, 2) - 1.0).abs() < 1e-15);
        assert!((g.get(2, 3) - 1.0).abs() < 1e-15);
        assert_eq!(g.get(2, 0), 0.0);
    }

    #[test]
    fn contrast_examples() {
        assert!(contrast_ms(&ColorImage::filled(5, 5, [0.3, 0.6, 0.9]).unwrap()) < 1e-30);
        let halves = ColorImage::from_fn(4, 4, |_, c| [if c < 2 { 0.0 } else { 1.0 }, 0.0, 0.0]).unwrap();
        assert!((contrast_ms(&halves) - 0.25).abs() < 1e-15);
        let img = texture(13, 10, 10);
        let scaled = ColorImage::new(img.channels().clone().map(|p| {
            let m = p.mean();
            p.map(|v| m + 0.5 * (v - m))
        }))
        .unwrap();
        assert!((contrast_ms(&scaled) - 0.25 * contrast_ms(&img)).abs() < 1e-12);
    }
}
