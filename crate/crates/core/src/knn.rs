//! Static 3-d tree for k-nearest-neighbour stencils.

use alloc::vec::Vec;

use crate::Vec3;

/// Balanced k-d tree over a fixed point set; queries return indices into
/// the original slice.
#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<Vec3>,
    // Implicit tree: the median of each subrange is its root.
    order: Vec<u32>,
}

#[inline]
fn coord(p: Vec3, axis: usize) -> f64 {
    match axis {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

impl KdTree {
    pub fn new(points: &[Vec3]) -> Self {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        build(points, &mut order, 0);
        Self { points: points.to_vec(), order }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Vec3 {
        self.points[i]
    }

    /// The `k` points nearest to `q` as `(index, squared distance)`, nearest
    /// first; ties broken by index.
    pub fn nearest(&self, q: Vec3, k: usize, out: &mut Vec<(u32, f64)>) {
        out.clear();
        let k = k.min(self.points.len());
        if k == 0 {
            return;
        }
        self.search(q, k, 0, self.order.len(), 0, out);
    }

    fn search(&self, q: Vec3, k: usize, lo: usize, hi: usize, axis: usize, best: &mut Vec<(u32, f64)>) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let idx = self.order[mid];
        let p = self.points[idx as usize];
        insert(best, k, (idx, (p - q).norm_squared()));

        let diff = coord(q, axis) - coord(p, axis);
        let next = (axis + 1) % 3;
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(q, k, near.0, near.1, next, best);
        if best.len() < k || diff * diff <= best[best.len() - 1].1 {
            self.search(q, k, far.0, far.1, next, best);
        }
    }
}

fn insert(best: &mut Vec<(u32, f64)>, k: usize, cand: (u32, f64)) {
    let worse = |a: &(u32, f64), b: &(u32, f64)| a.1 > b.1 || (a.1 == b.1 && a.0 > b.0);
    if best.len() == k && !worse(&best[k - 1], &cand) {
        return;
    }
    let pos = best.iter().position(|e| worse(e, &cand)).unwrap_or(best.len());
    best.insert(pos, cand);
    best.truncate(k);
}

fn build(points: &[Vec3], order: &mut [u32], axis: usize) {
    if order.len() <= 1 {
        return;
    }
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        coord(points[a as usize], axis)
            .total_cmp(&coord(points[b as usize], axis))
            .then(a.cmp(&b))
    });
    let (left, right) = order.split_at_mut(mid);
    build(points, left, (axis + 1) % 3);
    build(points, &mut right[1..], (axis + 1) % 3);
}
