use std::fmt;

use crate::{Error, Result};

/// Largest number of spatial orbitals a [`Determinant`] can address: the
/// interleaved spin-orbital mask must fit a `u64`.
pub const MAX_ORBITALS: usize = 32;

/// Slater determinant as per-spin occupation bitmasks over spatial orbitals.
///
/// Bit `p` of `alpha` (`beta`) marks spatial orbital `p` occupied by a spin-up
/// (spin-down) electron. On qubits the map is interleaved: qubit `2p` is the
/// α spin orbital of `p`, qubit `2p + 1` the β one. The derived ordering,
/// ascending `(alpha, beta)`, is the canonical determinant order used for
/// every tie-break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Determinant {
    pub alpha: u64,
    pub beta: u64,
}

#[inline]
fn spread(x: u64) -> u64 {
    let mut x = x & 0xffff_ffff;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    (x | (x << 1)) & 0x5555_5555_5555_5555
}

#[inline]
fn compact(x: u64) -> u64 {
    let mut x = x & 0x5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x >> 4)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x >> 8)) & 0x0000_ffff_0000_ffff;
    (x | (x >> 16)) & 0x0000_0000_ffff_ffff
}

impl Determinant {
    pub const fn new(alpha: u64, beta: u64) -> Self {
        Self { alpha, beta }
    }

    pub fn n_alpha(&self) -> u32 {
        self.alpha.count_ones()
    }

    pub fn n_beta(&self) -> u32 {
        self.beta.count_ones()
    }

    pub fn sector(&self) -> (u32, u32) {
        (self.n_alpha(), self.n_beta())
    }

    /// Interleaved spin-orbital (= qubit) occupation mask.
    #[inline]
    pub fn spin_orbitals(&self) -> u64 {
        spread(self.alpha) | (spread(self.beta) << 1)
    }

    /// Inverse of [`Determinant::spin_orbitals`]; also maps a computational
    /// basis index to its determinant.
    #[inline]
    pub fn from_spin_orbitals(mask: u64) -> Self {
        Self {
            alpha: compact(mask),
            beta: compact(mask >> 1),
        }
    }

    /// Number of spin orbitals in which two determinants differ.
    pub fn excitation_degree(&self, other: &Self) -> u32 {
        ((self.alpha ^ other.alpha).count_ones() + (self.beta ^ other.beta).count_ones()) / 2
    }

    /// `alpha_hex beta_hex`, as used by the circuit and wavefunction files.
    pub fn to_hex(&self) -> (String, String) {
        (format!("{:x}", self.alpha), format!("{:x}", self.beta))
    }

    pub fn from_hex(alpha: &str, beta: &str) -> Result<Self> {
        let parse = |s: &str| {
            let s = s.trim();
            let s = s.strip_prefix("0x").unwrap_or(s);
            u64::from_str_radix(s, 16)
        };
        match (parse(alpha), parse(beta)) {
            (Ok(a), Ok(b)) => Ok(Self::new(a, b)),
            _ => Err(Error::Config(format!("bad hex determinant '{alpha} {beta}'"))),
        }
    }

    /// Occupation label of spatial orbital `p`: 0, 1 (↑), 2 (↓) or 3 (doubly occupied).
    pub fn orbital_label(&self, p: usize) -> u8 {
        (((self.alpha >> p) & 1) | (((self.beta >> p) & 1) << 1)) as u8
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}/{:x}", self.alpha, self.beta)
    }
}

/// All `n_orb`-bit masks with `k` bits set, ascending.
pub fn combinations(n_orb: usize, k: usize) -> Vec<u64> {
    if k > n_orb {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = if n_orb >= 64 { u64::MAX } else { (1u64 << n_orb) - 1 };
    let mut out = Vec::new();
    let mut v: u64 = (1u64 << k) - 1;
    loop {
        out.push(v);
        // Gosper's hack
        let c = v & v.wrapping_neg();
        let r = v.wrapping_add(c);
        if r == 0 {
            break;
        }
        let next = (((r ^ v) >> 2) / c) | r;
        if next > limit || next < v {
            break;
        }
        v = next;
    }
    out
}

/// Every determinant of the `(n_alpha, n_beta)` sector, in canonical order.
pub fn sector_determinants(n_orb: usize, n_alpha: usize, n_beta: usize) -> Vec<Determinant> {
    let alphas = combinations(n_orb, n_alpha);
    let betas = combinations(n_orb, n_beta);
    let mut out = Vec::with_capacity(alphas.len() * betas.len());
    for &a in &alphas {
        for &b in &betas {
            out.push(Determinant::new(a, b));
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
