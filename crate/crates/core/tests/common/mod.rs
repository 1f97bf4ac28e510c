//! Dense reference implementation built straight from basis-label strings.
//! Shares no code with the library beyond the final conversion to `Ket`.

#![allow(dead_code)]

use cheshire_core::hilbert::{BasisConvention, Ket};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense vector over `4^n` labels `p_1..p_n s_1..s_n` (path then polarization bits).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

pub fn label_of(n: usize, k: usize) -> String {
    format!("{k:0width$b}", width = 2 * n)
}

fn index_of(label: &str) -> usize {
    usize::from_str_radix(label, 2).expect("binary label")
}

impl Dense {
    pub fn zero(n: usize) -> Self {
        Self { n, amps: vec![c(0.0, 0.0); 1 << (2 * n)] }
    }

    /// Sum of `amp |label>` terms; labels are binary strings of length `2n`.
    pub fn from_terms(n: usize, terms: &[(&str, Complex64)]) -> Self {
        let mut d = Self::zero(n);
        for (label, a) in terms {
            assert_eq!(label.len(), 2 * n, "label `{label}`");
            d.amps[index_of(label)] += *a;
        }
        d
    }

    pub fn to_ket(&self) -> Ket {
        let conv = BasisConvention::new(self.n).unwrap();
        Ket::from_amplitudes(conv, self.amps.iter().copied().enumerate()).unwrap()
    }

    pub fn from_ket(k: &Ket) -> Self {
        let mut d = Self::zero(k.photons());
        for (i, a) in k.iter() {
            d.amps[i] = a;
        }
        d
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Dense) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    /// Path character (`'0'` = L) of `photon` in each label.
    fn path_char(&self, k: usize, photon: usize) -> char {
        label_of(self.n, k).as_bytes()[photon - 1] as char
    }

    pub fn project_path(&self, photon: usize, arm: char) -> Dense {
        let want = if arm == 'L' { '0' } else { '1' };
        let mut out = Dense::zero(self.n);
        for k in 0..self.amps.len() {
            if self.path_char(k, photon) == want {
                out.amps[k] = self.amps[k];
            }
        }
        out
    }

    /// Applies a 2x2 matrix in the (H, V) basis to `photon`'s polarization.
    pub fn apply_pol(&self, photon: usize, m: [[Complex64; 2]; 2]) -> Dense {
        let mut out = Dense::zero(self.n);
        for k in 0..self.amps.len() {
            let label = label_of(self.n, k);
            let pos = self.n + photon - 1;
            let col = (label.as_bytes()[pos] - b'0') as usize;
            for (row, m_row) in m.iter().enumerate() {
                let mut bytes = label.clone().into_bytes();
                bytes[pos] = b'0' + row as u8;
                let target = index_of(std::str::from_utf8(&bytes).unwrap());
                out.amps[target] += m_row[col] * self.amps[k];
            }
        }
        out
    }

    /// `σ_z^{arm}` built from the circular basis `|up> = (H + iV)/√2`, `|down> = (H - iV)/√2`.
    pub fn grin(&self, photon: usize, arm: char) -> Dense {
        self.project_path(photon, arm).apply_pol(photon, circular_sigma())
    }

    pub fn scaled(&self, s: Complex64) -> Dense {
        Dense { n: self.n, amps: self.amps.iter().map(|a| a * s).collect() }
    }

    pub fn add(&self, other: &Dense) -> Dense {
        Dense { n: self.n, amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() }
    }
}

pub fn circular_sigma() -> [[Complex64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let up = [c(s, 0.0), c(0.0, s)];
    let down = [c(s, 0.0), c(0.0, -s)];
    let mut m = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            m[r][col] = up[r] * up[col].conj() - down[r] * down[col].conj();
        }
    }
    m
}

/// `<post|O|pre> / <post|pre>` with `o_pre = O|pre>`.
pub fn weak_value(post: &Dense, o_pre: &Dense, pre: &Dense) -> Complex64 {
    post.inner(o_pre) / post.inner(pre)
}

/// Path string of the two pre-state terms of the `n`-photon family:
/// photon k in L for odd k (first term), mirrored in the second.
pub fn alternating_paths(n: usize) -> (String, String) {
    let a: String = (1..=n).map(|k| if k % 2 == 1 { '0' } else { '1' }).collect();
    let b: String = a.chars().map(|ch| if ch == '0' { '1' } else { '0' }).collect();
    (a, b)
}

/// Pre- and post-state of the `n`-photon family: the post-state holds `-i` on
/// the first pre term and `1` on every second-term path block with exactly
/// one vertical photon.
pub fn n_cat_oracle(n: usize) -> (Dense, Dense) {
    let (a, b) = alternating_paths(n);
    let h = "0".repeat(n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pre = Dense::from_terms(n, &[(&format!("{a}{h}"), c(s, 0.0)), (&format!("{b}{h}"), c(s, 0.0))]);
    let w = 1.0 / ((n + 1) as f64).sqrt();
    let mut labels = vec![(format!("{a}{h}"), c(0.0, -w))];
    for v in 0..n {
        let pol: String = (0..n).map(|k| if k == v { '1' } else { '0' }).collect();
        labels.push((format!("{b}{pol}"), c(w, 0.0)));
    }
    let terms: Vec<(&str, Complex64)> = labels.iter().map(|(l, a)| (l.as_str(), *a)).collect();
    (pre, Dense::from_terms(n, &terms))
}
