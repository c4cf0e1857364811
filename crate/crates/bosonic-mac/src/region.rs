//! Multiple-access rate regions defined by one sum-rate constraint per
//! nonempty subset of users, with vertex, containment, area, and
//! boundary-trace queries.
//!
//! Regions are stored as explicit subset-bound maps (the form in which every
//! capacity formula is stated); two-user vertices are derived on demand.

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::gaussian::RateUnit;
use crate::{Error, Result};

/// Absolute tolerance for containment queries.
pub const CONTAINS_TOL: f64 = 1e-12;

/// Absolute tolerance for "this point lies on the boundary" checks.
pub const BOUNDARY_TOL: f64 = 1e-9;

const MAX_USERS: usize = 20;

/// A rate region `{ sum_{i in S} R_i <= bound(S) }` over all nonempty
/// subsets `S` of `m` users. Bounds must be monotone in `S` (validated on
/// construction) and are immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    num_users: usize,
    unit: RateUnit,
    /// Indexed by subset bitmask; entry 0 is unused and fixed at 0.
    bounds: Vec<f64>,
}

impl RateRegion {
    /// Builds a region from a bound function over subset bitmasks
    /// (bit `i` set means user `i` is in the subset, 0-based).
    pub fn from_bound_fn(num_users: usize, mut bound: impl FnMut(u32) -> f64) -> Result<RateRegion> {
        if num_users == 0 || num_users > MAX_USERS {
            return Err(Error::InvalidModel(format!(
                "number of users must be in 1..={MAX_USERS}, got {num_users}"
            )));
        }
        let size = 1usize << num_users;
        let mut bounds = vec![0.0; size];
        for mask in 1..size {
            let b = bound(mask as u32);
            if !b.is_finite() || b < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "bound for subset {:?} must be finite and nonnegative, got {b}",
                    mask_to_users(mask as u32)
                )));
            }
            bounds[mask] = b;
        }
        // Monotonicity over single-element removals implies monotonicity on
        // the whole subset lattice. The slack absorbs roundoff in bounds
        // assembled from g-function differences.
        for mask in 1..size as u32 {
            for i in 0..num_users {
                let bit = 1u32 << i;
                if mask & bit != 0 && mask != bit {
                    let sub = mask & !bit;
                    if bounds[sub as usize] > bounds[mask as usize] + 1e-12 {
                        return Err(Error::NonmonotoneBounds {
                            smaller: mask_to_users(sub),
                            larger: mask_to_users(mask),
                            smaller_bound: bounds[sub as usize],
                            larger_bound: bounds[mask as usize],
                        });
                    }
                }
            }
        }
        Ok(RateRegion {
            num_users,
            unit: RateUnit::Nats,
            bounds,
        })
    }

    /// Two-user pentagon from individual bounds `b1`, `b2` and sum bound `b12`.
    pub fn two_user(b1: f64, b2: f64, b12: f64) -> Result<RateRegion> {
        RateRegion::from_bound_fn(2, |mask| match mask {
            0b01 => b1,
            0b10 => b2,
            _ => b12,
        })
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn unit(&self) -> RateUnit {
        self.unit
    }

    /// Bound for the subset encoded as a bitmask.
    pub fn bound_mask(&self, mask: u32) -> f64 {
        self.bounds[mask as usize]
    }

    /// Bound for a subset given as 0-based user indices.
    pub fn bound(&self, users: &[usize]) -> f64 {
        self.bound_mask(users_to_mask(users))
    }

    /// All nonempty subset masks, ordered by (cardinality, mask value).
    pub fn subset_masks(&self) -> Vec<u32> {
        let mut masks: Vec<u32> = (1..self.bounds.len() as u32).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
    }

    /// True iff every subset constraint holds within `CONTAINS_TOL`.
    pub fn contains(&self, rates: &[f64]) -> Result<bool> {
        self.contains_tol(rates, CONTAINS_TOL)
    }

    pub fn contains_tol(&self, rates: &[f64], tol: f64) -> Result<bool> {
        if rates.len() != self.num_users {
            return Err(Error::DimensionMismatch {
                region: self.num_users,
                point: rates.len(),
            });
        }
        if rates.iter().any(|r| *r < -tol) {
            return Ok(false);
        }
        for mask in 1..self.bounds.len() as u32 {
            let sum: f64 = (0..self.num_users)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| rates[i])
                .sum();
            if sum > self.bounds[mask as usize] + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Ordered vertices of the two-user pentagon: `(0,0)`, `(b1,0)`,
    /// `(b1, b12-b1)`, `(b12-b2, b2)`, `(0,b2)`, with duplicates collapsed
    /// when the sum constraint is inactive (`b12 >= b1 + b2`) or bounds
    /// degenerate to zero.
    pub fn two_user_vertices(&self) -> Result<Vec<[f64; 2]>> {
        if self.num_users != 2 {
            return Err(Error::InvalidModel(format!(
                "vertex enumeration requires 2 users, region has {}",
                self.num_users
            )));
        }
        let b1 = self.bounds[0b01];
        let b2 = self.bounds[0b10];
        let b12 = self.bounds[0b11].min(b1 + b2);
        let raw = [
            [0.0, 0.0],
            [b1, 0.0],
            [b1, b12 - b1],
            [b12 - b2, b2],
            [0.0, b2],
        ];
        let mut verts: Vec<[f64; 2]> = Vec::with_capacity(5);
        for v in raw {
            let v = [v[0].max(0.0), v[1].max(0.0)];
            if verts
                .last()
                .is_none_or(|u| (u[0] - v[0]).abs() > 1e-12 || (u[1] - v[1]).abs() > 1e-12)
            {
                verts.push(v);
            }
        }
        if verts.len() > 1 {
            let (first, last) = (verts[0], *verts.last().unwrap());
            if (first[0] - last[0]).abs() <= 1e-12 && (first[1] - last[1]).abs() <= 1e-12 {
                verts.pop();
            }
        }
        Ok(verts)
    }

    /// Shoelace area of the two-user vertex polygon.
    pub fn area(&self) -> Result<f64> {
        let verts = self.two_user_vertices()?;
        let mut twice = 0.0;
        for i in 0..verts.len() {
            let [x0, y0] = verts[i];
            let [x1, y1] = verts[(i + 1) % verts.len()];
            twice += x0 * y1 - x1 * y0;
        }
        Ok(0.5 * twice.abs())
    }

    /// Piecewise-linear trace of the upper-right boundary from `(0, b2)` to
    /// `(b1, 0)`, sampled uniformly by arc length (`samples >= 2` points,
    /// endpoints included).
    pub fn boundary_trace(&self, samples: usize) -> Result<Vec<[f64; 2]>> {
        if samples < 2 {
            return Err(Error::InvalidModel(format!(
                "boundary trace needs at least 2 samples, got {samples}"
            )));
        }
        let verts = self.two_user_vertices()?;
        // Boundary path: walk vertices from (0, b2) back to (b1, 0),
        // i.e. the vertex list reversed, skipping the origin.
        let path: Vec<[f64; 2]> = verts.iter().rev().copied().collect();
        let path: Vec<[f64; 2]> = if path.len() > 1 {
            path[..path.len() - 1].to_vec()
        } else {
            path
        };
        if path.len() == 1 {
            return Ok(vec![path[0]; samples]);
        }
        let seg_len: Vec<f64> = path
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .collect();
        let total: f64 = seg_len.iter().sum();
        if total == 0.0 {
            return Ok(vec![path[0]; samples]);
        }
        let mut out = Vec::with_capacity(samples);
        for k in 0..samples {
            let target = total * k as f64 / (samples - 1) as f64;
            let mut acc = 0.0;
            let mut point = *path.last().unwrap();
            for (i, len) in seg_len.iter().enumerate() {
                if target <= acc + len || i == seg_len.len() - 1 {
                    let t = if *len > 0.0 {
                        ((target - acc) / len).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    point = [
                        path[i][0] + t * (path[i + 1][0] - path[i][0]),
                        path[i][1] + t * (path[i + 1][1] - path[i][1]),
                    ];
                    break;
                }
                acc += len;
            }
            out.push(point);
        }
        Ok(out)
    }

    /// Same region expressed in another unit (bounds scaled exactly once).
    pub fn in_unit(&self, unit: RateUnit) -> RateRegion {
        if unit == self.unit {
            return self.clone();
        }
        // Stored regions are built in nats; converting back restores them.
        let factor = match (self.unit, unit) {
            (RateUnit::Nats, RateUnit::Bits) => RateUnit::Bits.factor_from_nats(),
            (RateUnit::Bits, RateUnit::Nats) => std::f64::consts::LN_2,
            _ => 1.0,
        };
        RateRegion {
            num_users: self.num_users,
            unit,
            bounds: self.bounds.iter().map(|b| b * factor).collect(),
        }
    }

    /// Componentwise containment of `inner`'s constraints in `self`'s:
    /// true iff every subset bound of `inner` is at most `self`'s.
    pub fn dominates(&self, inner: &RateRegion) -> Result<bool> {
        if inner.num_users != self.num_users {
            return Err(Error::DimensionMismatch {
                region: self.num_users,
                point: inner.num_users,
            });
        }
        Ok(self
            .bounds
            .iter()
            .zip(&inner.bounds)
            .all(|(outer, inner)| *inner <= outer + CONTAINS_TOL))
    }
}

fn users_to_mask(users: &[usize]) -> u32 {
    users.iter().fold(0u32, |m, i| m | (1 << i))
}

/// 1-based user indices of a subset mask, for display and serialization.
pub fn mask_to_users(mask: u32) -> Vec<usize> {
    (0..MAX_USERS).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

/// Builds an `m`-user region from a bound function over subsets given as
/// 0-based index slices, enumerating all `2^m - 1` constraints and
/// validating monotonicity.
pub fn subset_region(
    num_users: usize,
    mut bound: impl FnMut(&[usize]) -> f64,
) -> Result<RateRegion> {
    let mut scratch = Vec::with_capacity(num_users);
    RateRegion::from_bound_fn(num_users, |mask| {
        scratch.clear();
        scratch.extend((0..num_users).filter(|i| mask & (1 << i) != 0));
        bound(&scratch)
    })
}

// JSON form: {"unit", "num_users", "constraints": [{"subset", "bound"}],
// "vertices": [[r1, r2]]} with 1-based subsets and vertices present only
// for two-user regions.
impl Serialize for RateRegion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Constraints<'a>(&'a RateRegion);
        impl Serialize for Constraints<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                #[derive(Serialize)]
                struct Row {
                    subset: Vec<usize>,
                    bound: f64,
                }
                let masks = self.0.subset_masks();
                let mut seq = serializer.serialize_seq(Some(masks.len()))?;
                for mask in masks {
                    seq.serialize_element(&Row {
                        subset: mask_to_users(mask),
                        bound: self.0.bound_mask(mask),
                    })?;
                }
                seq.end()
            }
        }

        let vertices = if self.num_users == 2 {
            self.two_user_vertices().ok()
        } else {
            None
        };
        let fields = if vertices.is_some() { 4 } else { 3 };
        let mut s = serializer.serialize_struct("RateRegion", fields)?;
        s.serialize_field("unit", &self.unit)?;
        s.serialize_field("num_users", &self.num_users)?;
        s.serialize_field("constraints", &Constraints(self))?;
        if let Some(v) = vertices {
            s.serialize_field("vertices", &v)?;
        }
        s.end()
    }
}
