use serde::{Deserialize, Serialize};

use crate::error::{Result, SpiralError};
use crate::signal::check_len;

use super::LinearMap;

/// Orthonormal wavelet family. `Daubechies(k)` has `k` vanishing moments and
/// `2k` taps; `Daubechies(1)` is the same filter as `Haar`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveletFamily {
    Haar,
    Daubechies(u8),
}

impl WaveletFamily {
    pub fn lowpass(self) -> Result<&'static [f64]> {
        Ok(match self {
            WaveletFamily::Haar | WaveletFamily::Daubechies(1) => &HAAR,
            WaveletFamily::Daubechies(2) => &DB2,
            WaveletFamily::Daubechies(3) => &DB3,
            WaveletFamily::Daubechies(4) => &DB4,
            WaveletFamily::Daubechies(5) => &DB5,
            WaveletFamily::Daubechies(6) => &DB6,
            WaveletFamily::Daubechies(7) => &DB7,
            WaveletFamily::Daubechies(8) => &DB8,
            WaveletFamily::Daubechies(k) => {
                return Err(SpiralError::InvalidParameter(format!(
                    "Daubechies order {k} not available (1..=8)"
                )))
            }
        })
    }
}

/// A periodized orthonormal wavelet basis `W` on 1D signals or 2D images.
///
/// Coefficients use the in-place Mallat layout: for 1D, `[a_J, d_J, ..., d_1]`;
/// for 2D, the approximation block sits in the top-left corner and each level
/// transforms rows then columns of the current block.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    family: WaveletFamily,
    rows: usize,
    cols: usize,
    levels: usize,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl OrthoBasis {
    /// Full-depth basis for signals of length `n` (a power of two).
    pub fn new_1d(family: WaveletFamily, n: usize) -> Result<Self> {
        Self::with_shape(family, 1, n, None)
    }

    /// Full-depth separable basis for a `rows x cols` image.
    pub fn new_2d(family: WaveletFamily, rows: usize, cols: usize) -> Result<Self> {
        Self::with_shape(family, rows, cols, None)
    }

    /// `levels = None` means as many levels as the shortest dimension allows.
    pub fn with_shape(
        family: WaveletFamily,
        rows: usize,
        cols: usize,
        levels: Option<usize>,
    ) -> Result<Self> {
        for (name, d) in [("rows", rows), ("cols", cols)] {
            if d == 0 || !d.is_power_of_two() {
                return Err(SpiralError::InvalidShape(format!(
                    "periodized wavelet transform needs power-of-two {name}, got {d}"
                )));
            }
        }
        let depth = if rows == 1 {
            cols.trailing_zeros() as usize
        } else {
            rows.min(cols).trailing_zeros() as usize
        };
        let levels = match levels {
            None => depth,
            Some(l) if l <= depth => l,
            Some(l) => {
                return Err(SpiralError::InvalidParameter(format!(
                    "{l} levels requested but at most {depth} are possible"
                )))
            }
        };
        let lowpass = family.lowpass()?.to_vec();
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - k]
            })
            .collect();
        Ok(Self {
            family,
            rows,
            cols,
            levels,
            lowpass,
            highpass,
        })
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `θ = Wᵀ f`.
    pub fn analysis(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), f.len())?;
        let mut out = f.to_vec();
        self.analysis_in_place(&mut out);
        Ok(out)
    }

    /// `f = W θ`.
    pub fn synthesis(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), theta.len())?;
        let mut out = theta.to_vec();
        self.synthesis_in_place(&mut out);
        Ok(out)
    }

    pub fn analysis_in_place(&self, data: &mut [f64]) {
        let mut scratch = vec![0.0; self.rows.max(self.cols)];
        let mut line = vec![0.0; self.rows.max(self.cols)];
        let (mut r, mut c) = (self.rows, self.cols);
        for _ in 0..self.levels {
            for i in 0..r {
                let row = &mut data[i * self.cols..i * self.cols + c];
                self.analysis_step(row, &mut scratch[..c]);
            }
            if self.rows > 1 {
                for j in 0..c {
                    for i in 0..r {
                        line[i] = data[i * self.cols + j];
                    }
                    self.analysis_step(&mut line[..r], &mut scratch[..r]);
                    for i in 0..r {
                        data[i * self.cols + j] = line[i];
                    }
                }
                r /= 2;
            }
            c /= 2;
        }
    }

    pub fn synthesis_in_place(&self, data: &mut [f64]) {
        let mut scratch = vec![0.0; self.rows.max(self.cols)];
        let mut line = vec![0.0; self.rows.max(self.cols)];
        for level in (0..self.levels).rev() {
            let c = self.cols >> level;
            let r = if self.rows > 1 { self.rows >> level } else { 1 };
            if self.rows > 1 {
                for j in 0..c {
                    for i in 0..r {
                        line[i] = data[i * self.cols + j];
                    }
                    self.synthesis_step(&mut line[..r], &mut scratch[..r]);
                    for i in 0..r {
                        data[i * self.cols + j] = line[i];
                    }
                }
            }
            for i in 0..r {
                let row = &mut data[i * self.cols..i * self.cols + c];
                self.synthesis_step(row, &mut scratch[..c]);
            }
        }
    }

    // One periodized analysis level: x -> [lowpass | highpass] halves.
    fn analysis_step(&self, x: &mut [f64], scratch: &mut [f64]) {
        let n = x.len();
        let half = n / 2;
        for i in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (k, (h, g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                let v = x[(2 * i + k) % n];
                a += h * v;
                d += g * v;
            }
            scratch[i] = a;
            scratch[half + i] = d;
        }
        x.copy_from_slice(scratch);
    }

    fn synthesis_step(&self, x: &mut [f64], scratch: &mut [f64]) {
        let n = x.len();
        let half = n / 2;
        scratch.fill(0.0);
        for i in 0..half {
            let (a, d) = (x[i], x[half + i]);
            for (k, (h, g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                scratch[(2 * i + k) % n] += h * a + g * d;
            }
        }
        x.copy_from_slice(scratch);
    }
}

/// As a linear map, the basis is the synthesis operator `θ -> Wθ`; its
/// adjoint is the analysis operator.
impl LinearMap for OrthoBasis {
    fn rows(&self) -> usize {
        self.len()
    }

    fn cols(&self) -> usize {
        self.len()
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        self.synthesis_in_place(out);
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
        self.analysis_in_place(out);
    }
}

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

// Minimum-phase Daubechies scaling filters, normalized to sum sqrt(2).
#[allow(clippy::excessive_precision)]
mod taps {
    pub(super) const DB2: [f64; 4] = [
        0.4829629131445341434,
        0.8365163037378079056,
        0.224143868042013381,
        -0.1294095225512603812,
    ];
    pub(super) const DB3: [f64; 6] = [
        0.332670552950082616,
        0.8068915093110925765,
        0.4598775021184915701,
        -0.1350110200102545887,
        -0.08544127388202666169,
        0.0352262918857095366,
    ];
    pub(super) const DB4: [f64; 8] = [
        0.2303778133088965009,
        0.7148465705529156471,
        0.6308807679298589079,
        -0.02798376941685985421,
        -0.1870348117190930841,
        0.03084138183556076363,
        0.03288301166688519974,
        -0.0105974017850690321,
    ];
    pub(super) const DB5: [f64; 10] = [
        0.1601023979741929145,
        0.6038292697971896705,
        0.7243085284377729277,
        0.1384281459013207315,
        -0.2422948870663820319,
        -0.03224486958463837465,
        0.07757149384004571352,
        -0.006241490212798274274,
        -0.01258075199908199947,
        0.003335725285473771278,
    ];
    pub(super) const DB6: [f64; 12] = [
        0.1115407433501094636,
        0.4946238903984530857,
        0.7511339080210953507,
        0.3152503517091976291,
        -0.2262646939654398201,
        -0.1297668675672619356,
        0.0975016055873230491,
        0.02752286553030572863,
        -0.03158203931748602957,
        0.0005538422011614961393,
        0.00477725751094551064,
        -0.001077301085308479565,
    ];
    pub(super) const DB7: [f64; 14] = [
        0.07785205408500917902,
        0.3965393194819173065,
        0.7291320908462351199,
        0.4697822874051931225,
        -0.1439060039285649754,
        -0.2240361849938749826,
        0.07130921926683026475,
        0.08061260915108307191,
        -0.03802993693501441358,
        -0.01657454163066688065,
        0.01255099855609984061,
        0.0004295779729213665211,
        -0.001801640704047490915,
        0.0003537137999745202484,
    ];
    pub(super) const DB8: [f64; 16] = [
        0.05441584224310400996,
        0.3128715909142999707,
        0.6756307362972898068,
        0.5853546836542067128,
        -0.01582910525634930567,
        -0.2840155429615469265,
        0.0004724845739132827704,
        0.1287474266204784589,
        -0.01736930100180754617,
        -0.04408825393079475151,
        0.01398102791739828165,
        0.008746094047405776716,
        -0.00487035299345157431,
        -0.0003917403733769470463,
        0.0006754494064505693664,
        -0.0001174767841247695337,
    ];
}
use taps::{DB2, DB3, DB4, DB5, DB6, DB7, DB8};

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn filters_are_orthonormal_under_even_shifts() {
        for k in 1..=8u8 {
            let h = WaveletFamily::Daubechies(k).lowpass().unwrap();
            for m in 0..h.len() / 2 {
                let s: f64 = (0..h.len() - 2 * m).map(|i| h[i] * h[i + 2 * m]).sum();
                let expected = if m == 0 { 1.0 } else { 0.0 };
                assert!((s - expected).abs() < 1e-14, "db{k} shift {m}: {s}");
            }
            let total: f64 = h.iter().sum();
            assert!((total - std::f64::consts::SQRT_2).abs() < 1e-14);
        }
    }

    #[test]
    fn haar_of_constant() {
        let n = 16;
        let c = 1.7;
        let basis = OrthoBasis::new_1d(WaveletFamily::Haar, n).unwrap();
        let theta = basis.analysis(&vec![c; n]).unwrap();
        assert!((theta[0] - c * (n as f64).sqrt()).abs() < 1e-12);
        assert!(theta[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn haar_of_constant_image() {
        let basis = OrthoBasis::new_2d(WaveletFamily::Haar, 8, 8).unwrap();
        let theta = basis.analysis(&[2.0; 64]).unwrap();
        assert!((theta[0] - 16.0).abs() < 1e-12);
        assert!(theta[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn round_trip_and_isometry() {
        let mut seed = 7;
        for family in [
            WaveletFamily::Haar,
            WaveletFamily::Daubechies(2),
            WaveletFamily::Daubechies(6),
            WaveletFamily::Daubechies(8),
        ] {
            for (r, c) in [(1, 64), (16, 16), (8, 32)] {
                let basis = OrthoBasis::with_shape(family, r, c, None).unwrap();
                let f: Vec<f64> = (0..r * c).map(|_| lcg(&mut seed)).collect();
                let theta = basis.analysis(&f).unwrap();
                let back = basis.synthesis(&theta).unwrap();
                let nf = crate::vecops::norm(&f);
                let err = crate::vecops::dist_sq(&f, &back).sqrt();
                assert!(err <= 1e-10 * nf, "{family:?} {r}x{c}: {err}");
                let nt = crate::vecops::norm(&theta);
                assert!((nt - nf).abs() <= 1e-10 * nf);
            }
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(OrthoBasis::new_1d(WaveletFamily::Haar, 12).is_err());
        assert!(OrthoBasis::new_2d(WaveletFamily::Haar, 8, 6).is_err());
        assert!(WaveletFamily::Daubechies(9).lowpass().is_err());
        let b = OrthoBasis::new_1d(WaveletFamily::Haar, 8).unwrap();
        assert!(b.analysis(&[0.0; 7]).is_err());
    }

    #[test]
    fn partial_depth() {
        let basis = OrthoBasis::with_shape(WaveletFamily::Daubechies(4), 1, 32, Some(2)).unwrap();
        assert_eq!(basis.levels(), 2);
        assert!(OrthoBasis::with_shape(WaveletFamily::Haar, 1, 32, Some(6)).is_err());
    }
}
