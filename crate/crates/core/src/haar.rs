//! Orthonormal 2-D discrete Haar wavelet transform.
//!
//! Each level maps a `2m x 2n` plane to four `m x n` blocks through 2x2
//! butterflies. With pixels `p00 p01 / p10 p11` of one block:
//!
//! ```text
//! a = (p00 + p01 + p10 + p11) / 2
//! h = (p00 - p01 + p10 - p11) / 2
//! v = (p00 + p01 - p10 - p11) / 2
//! d = (p00 - p01 - p10 + p11) / 2
//! ```
//!
//! This is `W X W^T` for the orthonormal single-level Haar matrix `W`, laid out
//! as `[[a, h], [v, d]]`. A constant block of value `c` gives `a = 2c`, so an
//! `l`-level low band scales constants by `2^l`.

use crate::error::{Error, Result};
use crate::image::Plane;

/// The three detail blocks of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBands {
    pub h: Plane,
    pub v: Plane,
    pub d: Plane,
}

impl DetailBands {
    pub fn dims(&self) -> (usize, usize) {
        self.h.dims()
    }

    pub fn sum_sq(&self) -> f64 {
        self.h.sum_sq() + self.v.sum_sq() + self.d.sum_sq()
    }

    pub fn max_abs(&self) -> f64 {
        [&self.h, &self.v, &self.d]
            .iter()
            .flat_map(|p| p.values())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Low band plus details of a single-level transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSet {
    pub a: Plane,
    pub h: Plane,
    pub v: Plane,
    pub d: Plane,
}

impl SubbandSet {
    pub fn from_parts(a: Plane, details: DetailBands) -> Result<Self> {
        a.ensure_same_dims(&details.h)?;
        a.ensure_same_dims(&details.v)?;
        a.ensure_same_dims(&details.d)?;
        Ok(Self {
            a,
            h: details.h,
            v: details.v,
            d: details.d,
        })
    }

    pub fn into_parts(self) -> (Plane, DetailBands) {
        (
            self.a,
            DetailBands {
                h: self.h,
                v: self.v,
                d: self.d,
            },
        )
    }

    pub fn sum_sq(&self) -> f64 {
        self.a.sum_sq() + self.h.sum_sq() + self.v.sum_sq() + self.d.sum_sq()
    }
}

/// Multilevel decomposition: the coarsest low band and the detail bands of
/// every level, finest (level 1) first.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub low: Plane,
    pub details: Vec<DetailBands>,
}

impl WaveletPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn sum_sq(&self) -> f64 {
        self.low.sum_sq() + self.details.iter().map(DetailBands::sum_sq).sum::<f64>()
    }
}

pub fn dhwt_forward(plane: &Plane) -> Result<SubbandSet> {
    let (rows, cols) = plane.dims();
    if rows % 2 != 0 || cols % 2 != 0 {
        return Err(Error::NotDivisible {
            rows,
            cols,
            divisor: 2,
        });
    }
    let (hr, hc) = (rows / 2, cols / 2);
    let mut a = Vec::with_capacity(hr * hc);
    let mut h = Vec::with_capacity(hr * hc);
    let mut v = Vec::with_capacity(hr * hc);
    let mut d = Vec::with_capacity(hr * hc);
    let src = plane.values();
    for br in 0..hr {
        let top = &src[2 * br * cols..(2 * br + 1) * cols];
        let bottom = &src[(2 * br + 1) * cols..(2 * br + 2) * cols];
        for bc in 0..hc {
            let (p00, p01) = (top[2 * bc], top[2 * bc + 1]);
            let (p10, p11) = (bottom[2 * bc], bottom[2 * bc + 1]);
            // row butterflies first, then column butterflies
            let (s0, d0) = (p00 + p01, p00 - p01);
            let (s1, d1) = (p10 + p11, p10 - p11);
            a.push(0.5 * (s0 + s1));
            h.push(0.5 * (d0 + d1));
            v.push(0.5 * (s0 - s1));
            d.push(0.5 * (d0 - d1));
        }
    }
    let mk = |data| Plane::new(hr, hc, data);
    Ok(SubbandSet {
        a: mk(a)?,
        h: mk(h)?,
        v: mk(v)?,
        d: mk(d)?,
    })
}

pub fn dhwt_inverse(sub: &SubbandSet) -> Result<Plane> {
    let (hr, hc) = sub.a.dims();
    for block in [&sub.h, &sub.v, &sub.d] {
        sub.a.ensure_same_dims(block)?;
    }
    let (rows, cols) = (2 * hr, 2 * hc);
    let mut out = vec![0.0; rows * cols];
    let (a, h, v, d) = (
        sub.a.values(),
        sub.h.values(),
        sub.v.values(),
        sub.d.values(),
    );
    for br in 0..hr {
        for bc in 0..hc {
            let i = br * hc + bc;
            let (s0, s1) = (a[i] + v[i], a[i] - v[i]);
            let (d0, d1) = (h[i] + d[i], h[i] - d[i]);
            let top = 2 * br * cols + 2 * bc;
            let bottom = top + cols;
            out[top] = 0.5 * (s0 + d0);
            out[top + 1] = 0.5 * (s0 - d0);
            out[bottom] = 0.5 * (s1 + d1);
            out[bottom + 1] = 0.5 * (s1 - d1);
        }
    }
    Plane::new(rows, cols, out)
}

/// Applies the single-level transform `levels` times to the successive low
/// bands. `levels == 0` yields a pyramid whose low band is the input.
pub fn dhwt_forward_multi(plane: &Plane, levels: usize) -> Result<WaveletPyramid> {
    let block = 1usize
        .checked_shl(levels as u32)
        .ok_or_else(|| Error::InvalidParameter(format!("{levels} levels is too deep")))?;
    if !plane.rows().is_multiple_of(block) || !plane.cols().is_multiple_of(block) {
        return Err(Error::NotDivisible {
            rows: plane.rows(),
            cols: plane.cols(),
            divisor: block,
        });
    }
    let mut low = plane.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, det) = dhwt_forward(&low)?.into_parts();
        details.push(det);
        low = a;
    }
    Ok(WaveletPyramid { low, details })
}

pub fn dhwt_inverse_multi(pyramid: &WaveletPyramid) -> Result<Plane> {
    let mut low = pyramid.low.clone();
    for det in pyramid.details.iter().rev() {
        let sub = SubbandSet::from_parts(low, det.clone())?;
        low = dhwt_inverse(&sub)?;
    }
    Ok(low)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Plane {
        Plane::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Single-level orthonormal Haar analysis matrix: low-pass rows on top.
    fn haar_matrix(n: usize) -> Vec<Vec<f64>> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut w = vec![vec![0.0; n]; n];
        for q in 0..n / 2 {
            w[q][2 * q] = s;
            w[q][2 * q + 1] = s;
            w[n / 2 + q][2 * q] = s;
            w[n / 2 + q][2 * q + 1] = -s;
        }
        w
    }

    fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let (n, k, m) = (a.len(), b.len(), b[0].len());
        let mut out = vec![vec![0.0; m]; n];
        for i in 0..n {
            for j in 0..m {
                out[i][j] = (0..k).map(|t| a[i][t] * b[t][j]).sum();
            }
        }
        out
    }

    fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        (0..a[0].len())
            .map(|j| a.iter().map(|row| row[j]).collect())
            .collect()
    }

    /// Level-k matrix: Haar on the leading `n / 2^(k-1)` coordinates, identity elsewhere.
    fn level_matrix(n: usize, k: usize) -> Vec<Vec<f64>> {
        let m = n >> (k - 1);
        let inner = haar_matrix(m);
        let mut w = vec![vec![0.0; n]; n];
        for (i, row) in w.iter_mut().enumerate() {
            if i < m {
                row[..m].copy_from_slice(&inner[i]);
            } else {
                row[i] = 1.0;
            }
        }
        w
    }

    fn to_rows(p: &Plane) -> Vec<Vec<f64>> {
        p.values().chunks(p.cols()).map(<[f64]>::to_vec).collect()
    }

    #[test]
    fn constant_block() {
        let p = Plane::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let s = dhwt_forward(&p).unwrap();
        assert_eq!(s.a.values(), &[2.0]);
        assert_eq!(s.h.values(), &[0.0]);
        assert_eq!(s.v.values(), &[0.0]);
        assert_eq!(s.d.values(), &[0.0]);
        assert_eq!(dhwt_inverse(&s).unwrap(), p);
    }

    #[test]
    fn identity_block() {
        let p = Plane::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let s = dhwt_forward(&p).unwrap();
        assert_eq!(s.a.values(), &[1.0]);
        assert_eq!(s.h.values(), &[0.0]);
        assert_eq!(s.v.values(), &[0.0]);
        assert_eq!(s.d.values(), &[1.0]);
        assert_eq!(dhwt_inverse(&s).unwrap(), p);
    }

    #[test]
    fn odd_dimensions_rejected() {
        let p = Plane::zeros(3, 4);
        assert!(matches!(
            dhwt_forward(&p),
            Err(Error::NotDivisible { divisor: 2, .. })
        ));
        assert!(dhwt_forward_multi(&Plane::zeros(8, 12), 3).is_err());
    }

    #[test]
    fn matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (rows, cols) in [(2, 2), (4, 6), (8, 4)] {
            let x = random_plane(&mut rng, rows, cols);
            let full = matmul(
                &matmul(&haar_matrix(rows), &to_rows(&x)),
                &transpose(&haar_matrix(cols)),
            );
            let s = dhwt_forward(&x).unwrap();
            let (hr, hc) = (rows / 2, cols / 2);
            for r in 0..hr {
                for c in 0..hc {
                    assert!((full[r][c] - s.a.get(r, c)).abs() < 1e-14);
                    assert!((full[r][hc + c] - s.h.get(r, c)).abs() < 1e-14);
                    assert!((full[hr + r][c] - s.v.get(r, c)).abs() < 1e-14);
                    assert!((full[hr + r][hc + c] - s.d.get(r, c)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn multilevel_matches_recursive_block_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (rows, cols, levels) = (8, 16, 3);
        let x = random_plane(&mut rng, rows, cols);
        let pyr = dhwt_forward_multi(&x, levels).unwrap();
        let mut low = to_rows(&x);
        for (k, det) in pyr.details.iter().enumerate() {
            let (m, n) = (low.len(), low[0].len());
            let full = matmul(&matmul(&haar_matrix(m), &low), &transpose(&haar_matrix(n)));
            let (dr, dc) = det.dims();
            assert_eq!((2 * dr, 2 * dc), (m, n));
            for r in 0..dr {
                for c in 0..dc {
                    assert!((full[r][dc + c] - det.h.get(r, c)).abs() < 1e-13, "level {k}");
                    assert!((full[dr + r][c] - det.v.get(r, c)).abs() < 1e-13, "level {k}");
                    assert!((full[dr + r][dc + c] - det.d.get(r, c)).abs() < 1e-13, "level {k}");
                }
            }
            low = full[..dr].iter().map(|row| row[..dc].to_vec()).collect();
        }
        for (r, row) in low.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert!((v - pyr.low.get(r, c)).abs() < 1e-13);
            }
        }
    }

    /// The complete factorisation `W_k ... W_1` has exactly the rows of the
    /// closed-form Haar basis: one scaling row and, for each scale `p` and
    /// shift `q`, `+-1/sqrt(2^(k-p))` on the two halves of its support.
    #[test]
    fn complete_factorisation_equals_closed_form_basis() {
        for k in 1..=4usize {
            let n = 1usize << k;
            let mut prod: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
                .collect();
            for level in 1..=k {
                prod = matmul(&level_matrix(n, level), &prod);
            }
            let mut basis = vec![vec![1.0 / (n as f64).sqrt(); n]];
            for p in 0..k {
                let support = 1usize << (k - p);
                let amp = 1.0 / (support as f64).sqrt();
                for q in 0..(1usize << p) {
                    basis.push(
                        (0..n)
                            .map(|x| {
                                let lo = q * support;
                                if x >= lo && x < lo + support / 2 {
                                    amp
                                } else if x >= lo + support / 2 && x < lo + support {
                                    -amp
                                } else {
                                    0.0
                                }
                            })
                            .collect(),
                    );
                }
            }
            let mut used = vec![false; n];
            for row in &prod {
                let hit = basis.iter().enumerate().position(|(i, b)| {
                    !used[i] && b.iter().zip(row).all(|(x, y)| (x - y).abs() < 1e-12)
                });
                let i = hit.expect("factorised row missing from closed-form basis");
                used[i] = true;
            }
            assert!(used.iter().all(|&u| u));
        }
    }

    #[test]
    fn constant_plane_two_levels() {
        let c = 0.35;
        let pyr = dhwt_forward_multi(&Plane::filled(8, 8, c), 2).unwrap();
        assert!(pyr.low.values().iter().all(|&v| (v - 4.0 * c).abs() < 1e-15));
        assert!(pyr.details.iter().all(|d| d.max_abs() == 0.0));
    }

    #[test]
    fn single_level_pyramid_matches_single_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_plane(&mut rng, 6, 10);
        let pyr = dhwt_forward_multi(&x, 1).unwrap();
        let s = dhwt_forward(&x).unwrap();
        assert_eq!(pyr.low, s.a);
        assert_eq!(pyr.details[0].h, s.h);
        assert_eq!(dhwt_inverse_multi(&pyr).unwrap(), dhwt_inverse(&s).unwrap());
    }

    #[test]
    fn zeroed_details_give_blocky_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_plane(&mut rng, 16, 8);
        let mut pyr = dhwt_forward_multi(&x, 2).unwrap();
        for det in &mut pyr.details {
            let (r, c) = det.dims();
            *det = DetailBands {
                h: Plane::zeros(r, c),
                v: Plane::zeros(r, c),
                d: Plane::zeros(r, c),
            };
        }
        let y = dhwt_inverse_multi(&pyr).unwrap();
        for r in 0..16 {
            for c in 0..8 {
                let anchor = y.get(r / 4 * 4, c / 4 * 4);
                assert!((y.get(r, c) - anchor).abs() < 1e-14);
                // block value is the block mean of the input
                let mean: f64 = (0..4)
                    .flat_map(|i| (0..4).map(move |j| (i, j)))
                    .map(|(i, j)| x.get(r / 4 * 4 + i, c / 4 * 4 + j))
                    .sum::<f64>()
                    / 16.0;
                assert!((anchor - mean).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_levels_is_identity() {
        let x = Plane::filled(3, 5, 0.25);
        let pyr = dhwt_forward_multi(&x, 0).unwrap();
        assert_eq!(pyr.levels(), 0);
        assert_eq!(dhwt_inverse_multi(&pyr).unwrap(), x);
    }

    proptest! {
        #[test]
        fn perfect_reconstruction(hr in 1usize..=8, hc in 1usize..=8, levels in 1usize..=4, seed: u64) {
            let block = 1 << levels;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_plane(&mut rng, hr * block, hc * block);
            let pyr = dhwt_forward_multi(&x, levels).unwrap();
            prop_assert!(dhwt_inverse_multi(&pyr).unwrap().max_abs_diff(&x) <= 1e-10);
            let energy = x.sum_sq();
            prop_assert!((pyr.sum_sq() - energy).abs() <= 1e-12 * energy.max(1e-300));
        }

        #[test]
        fn block_constant_maps_have_no_detail(hr in 1usize..=6, hc in 1usize..=6, levels in 1usize..=3, seed: u64) {
            let block = 1 << levels;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tiles = random_plane(&mut rng, hr, hc).map(|v| 0.6 + 0.4 * v);
            let t = Plane::from_fn(hr * block, hc * block, |r, c| tiles.get(r / block, c / block));
            let pyr = dhwt_forward_multi(&t, levels).unwrap();
            for det in &pyr.details {
                prop_assert!(det.max_abs() <= 1e-12);
            }
            let scale = block as f64;
            for r in 0..hr {
                for c in 0..hc {
                    prop_assert!((pyr.low.get(r, c) - scale * t.get(r * block, c * block)).abs() <= 1e-12);
                }
            }
        }
    }
}
