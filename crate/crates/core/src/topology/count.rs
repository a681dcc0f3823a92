//! Matrix-tree counting of radial configurations.
//!
//! Substations are merged into one root and forced branches are contracted;
//! the count is then the determinant of the reduced Laplacian of the
//! contracted multigraph, computed exactly with fraction-free elimination.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::netmodel::Network;
use crate::unionfind::UnionFind;

/// Number of radial configurations that close every branch in `forced_closed`.
pub fn count_spanning_trees(net: &Network, forced_closed: &[usize]) -> BigUint {
    count_spanning_forests(net, forced_closed, &[])
}

/// As [`count_spanning_trees`], additionally keeping `forbidden` branches open.
pub fn count_spanning_forests(net: &Network, forced_closed: &[usize], forbidden: &[usize]) -> BigUint {
    let n = net.n_buses();
    let mut uf = UnionFind::new(n);
    let subs = net.substations();
    for w in subs.windows(2) {
        uf.union(w[0], w[1]);
    }
    let mut excluded = vec![false; net.n_branches()];
    for &k in forbidden {
        excluded[k] = true;
    }
    for &k in forced_closed {
        if excluded[k] {
            return BigUint::zero();
        }
        let (a, b) = net.endpoints(k);
        if !uf.union(a, b) {
            return BigUint::zero();
        }
        excluded[k] = true;
    }

    // Relabel contracted nodes with the root last so it can be dropped.
    let root = uf.find(subs[0]);
    let mut label = vec![usize::MAX; n];
    let mut m = 0;
    for v in 0..n {
        let r = uf.find(v);
        if r != root && label[r] == usize::MAX {
            label[r] = m;
            m += 1;
        }
    }
    if m == 0 {
        return BigUint::one();
    }
    let mut lap = vec![vec![0i64; m]; m];
    for k in 0..net.n_branches() {
        if excluded[k] {
            continue;
        }
        let (a, b) = net.endpoints(k);
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            continue;
        }
        let la = (ra != root).then(|| label[ra]);
        let lb = (rb != root).then(|| label[rb]);
        if let Some(i) = la {
            lap[i][i] += 1;
        }
        if let Some(j) = lb {
            lap[j][j] += 1;
        }
        if let (Some(i), Some(j)) = (la, lb) {
            lap[i][j] -= 1;
            lap[j][i] -= 1;
        }
    }
    let mut mat: Vec<Vec<BigInt>> = lap
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    let det = bareiss_determinant(&mut mat);
    match det.sign() {
        Sign::Minus => unreachable!("reduced Laplacian minors are non-negative"),
        _ => det.magnitude().clone(),
    }
}

/// Fraction-free Gaussian elimination; consumes the matrix contents.
pub(crate) fn bareiss_determinant(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * prev
}
