//! Parity, time-reversal and combined PT actions on the ring, and the
//! generic (anti-)unitary action `A = W K` they are built from.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::linalg::{sigma0, sigma1, CMatrix, CVector, Mat2, C64, ZERO};
use crate::walk::LatticeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositionMap {
    Identity,
    /// `n -> (-n) mod N`.
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryKind {
    P,
    T,
    PT,
}

impl SymmetryKind {
    pub fn is_antiunitary(self) -> bool {
        !matches!(self, SymmetryKind::P)
    }
}

/// `x -> conj?( (I ⊗ coin_part) · Π x )` where `Π` permutes sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryAction {
    pub coin_part: Mat2,
    pub position_map: PositionMap,
    pub conjugate: bool,
    pub lattice: LatticeSpec,
}

pub fn build_symmetry(kind: SymmetryKind, lattice: LatticeSpec) -> SymmetryAction {
    let (coin_part, position_map, conjugate) = match kind {
        SymmetryKind::P => (sigma1(), PositionMap::Reflect, false),
        SymmetryKind::T => (sigma1(), PositionMap::Identity, true),
        SymmetryKind::PT => (sigma0(), PositionMap::Reflect, true),
    };
    SymmetryAction { coin_part, position_map, conjugate, lattice }
}

impl SymmetryAction {
    /// Plain complex conjugation `K` with no coin rotation or site permutation.
    pub fn conjugation(lattice: LatticeSpec) -> Self {
        SymmetryAction { coin_part: sigma0(), position_map: PositionMap::Identity, conjugate: true, lattice }
    }

    pub fn identity(lattice: LatticeSpec) -> Self {
        SymmetryAction { coin_part: sigma0(), position_map: PositionMap::Identity, conjugate: false, lattice }
    }

    /// Image of `site` under the site permutation. Both maps are involutions.
    #[inline]
    pub fn map_site(&self, site: usize) -> usize {
        match self.position_map {
            PositionMap::Identity => site,
            PositionMap::Reflect => self.lattice.reflect(site),
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.lattice.dim() {
            return Err(WalkError::Dimension { expected: self.lattice.dim(), actual: d });
        }
        Ok(())
    }

    pub fn apply_vector(&self, x: &CVector) -> Result<CVector> {
        self.check_dim(x.len())?;
        let mut out = CVector::zeros(x.len());
        for n in 0..self.lattice.num_sites() {
            let m = self.map_site(n);
            for a in 0..2 {
                let mut acc = ZERO;
                for b in 0..2 {
                    acc += self.coin_part[(a, b)] * x[2 * n + b];
                }
                out[2 * m + a] = if self.conjugate { acc.conj() } else { acc };
            }
        }
        Ok(out)
    }

    /// `A M A⁻¹ = W · conj?(M) · W†`, with `W` the unitary part of the action.
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_dim(m.nrows())?;
        self.check_dim(m.ncols())?;
        let sites = self.lattice.num_sites();
        let c = self.coin_part;
        let entry = |i: usize, j: usize| -> C64 {
            let z = m[(i, j)];
            if self.conjugate {
                z.conj()
            } else {
                z
            }
        };
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for mp in 0..sites {
            let n = self.map_site(mp);
            for mq in 0..sites {
                let nq = self.map_site(mq);
                let block = [
                    [entry(2 * n, 2 * nq), entry(2 * n, 2 * nq + 1)],
                    [entry(2 * n + 1, 2 * nq), entry(2 * n + 1, 2 * nq + 1)],
                ];
                for a in 0..2 {
                    for ap in 0..2 {
                        let mut acc = ZERO;
                        for (b, row) in block.iter().enumerate() {
                            for (bp, val) in row.iter().enumerate() {
                                acc += c[(a, b)] * val * c[(ap, bp)].conj();
                            }
                        }
                        out[(2 * mp + a, 2 * mq + ap)] = acc;
                    }
                }
            }
        }
        Ok(out)
    }
}
