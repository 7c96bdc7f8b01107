use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An increasing subset `zeta` of `{1, ..., k}`, stored as a bitmask
/// (bit `i - 1` set when `i` is a member).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionIndex {
    mask: u32,
    k: usize,
}

impl PartitionIndex {
    pub fn from_members(members: &[usize], k: usize) -> Result<Self> {
        if k > 31 {
            return Err(invalid("k too large for a subset index"));
        }
        let mut mask = 0u32;
        let mut prev = 0;
        for &i in members {
            if i <= prev || i > k {
                return Err(invalid(format!(
                    "{members:?} is not an increasing subset of 1..={k}"
                )));
            }
            mask |= 1 << (i - 1);
            prev = i;
        }
        Ok(Self { mask, k })
    }

    pub fn from_mask(mask: u32, k: usize) -> Self {
        Self {
            mask: mask & ((1u32 << k) - 1),
            k,
        }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Members in increasing order, 1-based.
    pub fn zeta(&self) -> Vec<usize> {
        (1..=self.k)
            .filter(|i| self.mask & (1 << (i - 1)) != 0)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// The complementary subset.
    pub fn complement(&self) -> Self {
        Self::from_mask(!self.mask, self.k)
    }
}

/// All `C(k, j)` increasing subsets of `{1..k}` with `j` members, in lexicographic order.
/// For `j = 0` this is the single empty subset.
pub fn partitions(j: usize, k: usize) -> Result<Vec<PartitionIndex>> {
    if j > k || k > 31 {
        return Err(invalid(format!("need 0 <= j <= k <= 31, got j={j}, k={k}")));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(j);
    fn rec(start: usize, j: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<PartitionIndex>) {
        if cur.len() == j {
            out.push(PartitionIndex::from_members(cur, k).expect("increasing by construction"));
            return;
        }
        for i in start..=k {
            if k - i + 1 < j - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, j, k, cur, out);
            cur.pop();
        }
    }
    rec(1, j, k, &mut cur, &mut out);
    Ok(out)
}

/// Default size guard for [`partition_families`].
pub const FAMILY_LIMIT: usize = 6;

/// Every `k`-tuple `(zeta^1, ..., zeta^k)` of increasing subsets of `{1..k}`
/// whose sizes sum to `k`. There are `C(k^2, k)` of them.
pub fn partition_families(k: usize) -> Result<Vec<Vec<PartitionIndex>>> {
    partition_families_with_limit(k, FAMILY_LIMIT)
}

pub fn partition_families_with_limit(k: usize, limit: usize) -> Result<Vec<Vec<PartitionIndex>>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if k > limit {
        return Err(Error::Guard {
            what: "partition family order k",
            value: k as f64,
            limit: limit as f64,
        });
    }
    let by_size: Vec<Vec<PartitionIndex>> =
        (0..=k).map(|j| partitions(j, k).expect("j <= k")).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        slot: usize,
        left: usize,
        k: usize,
        by_size: &[Vec<PartitionIndex>],
        cur: &mut Vec<PartitionIndex>,
        out: &mut Vec<Vec<PartitionIndex>>,
    ) {
        if slot == k {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for size in (0..=left).rev() {
            for p in &by_size[size] {
                cur.push(*p);
                rec(slot + 1, left - size, k, by_size, cur, out);
                cur.pop();
            }
        }
    }
    rec(0, k, k, &by_size, &mut cur, &mut out);
    Ok(out)
}

/// True when the nonempty members of `family` are pairwise disjoint, i.e. the
/// family is an ordered set partition of `{1..k}` padded with empty blocks.
pub fn is_set_partition(family: &[PartitionIndex]) -> bool {
    let mut seen = 0u32;
    for p in family {
        if seen & p.mask() != 0 {
            return false;
        }
        seen |= p.mask();
    }
    true
}

/// All set partitions of `{1..k}` as lists of block masks (blocks in order of
/// their smallest element). There are Bell(k) of them.
pub fn set_partitions(k: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, k: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == k {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, k, blocks, out);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        rec(i + 1, k, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), &mut out);
    out
}
