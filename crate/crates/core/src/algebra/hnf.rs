//! Hermite normal form of small integer lattices.

/// Row-style HNF of the lattice spanned by `rows` in `Z^cols`: upper triangular, positive
/// diagonal, entries above each pivot reduced into `[0, pivot)`. `None` if the rank is below `cols`.
pub fn hnf(rows: &[Vec<i128>], cols: usize) -> Option<Vec<Vec<i128>>> {
    let mut pool: Vec<Vec<i128>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut out: Vec<Vec<i128>> = Vec::with_capacity(cols);
    for col in 0..cols {
        loop {
            let pivot = pool.iter().enumerate().filter(|(_, r)| r[col] != 0).min_by_key(|(_, r)| r[col].abs()).map(|(i, _)| i)?;
            let piv = pool[pivot].clone();
            let mut done = true;
            for (i, r) in pool.iter_mut().enumerate() {
                if i != pivot && r[col] != 0 {
                    let q = r[col].div_euclid(piv[col]);
                    for (x, y) in r.iter_mut().zip(&piv) {
                        *x -= q * y;
                    }
                    if r[col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                let mut row = pool.swap_remove(pivot);
                if row[col] < 0 {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
                out.push(row);
                pool.retain(|r| r.iter().any(|&x| x != 0));
                break;
            }
        }
    }
    for j in 1..cols {
        for i in 0..j {
            let q = out[i][j].div_euclid(out[j][j]);
            if q != 0 {
                let pj = out[j].clone();
                for (x, y) in out[i].iter_mut().zip(&pj) {
                    *x -= q * y;
                }
            }
        }
    }
    Some(out)
}

/// Coordinates of `v` in an upper-triangular basis, if integral.
pub fn hnf_coords(basis: &[Vec<i128>], v: &[i128]) -> Option<Vec<i128>> {
    let mut rest = v.to_vec();
    let mut coords = vec![0; basis.len()];
    for (j, row) in basis.iter().enumerate() {
        if rest[j] % row[j] != 0 {
            return None;
        }
        let c = rest[j] / row[j];
        coords[j] = c;
        for (x, y) in rest.iter_mut().zip(row) {
            *x -= c * y;
        }
    }
    rest.iter().all(|&x| x == 0).then_some(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lattice() {
        let h = hnf(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3).unwrap();
        assert_eq!(h, vec![vec![2, 4, 4], vec![0, 6, 0], vec![0, 0, 12]]);
        assert!(hnf(&[vec![1, 2], vec![2, 4]], 2).is_none());
        assert_eq!(hnf_coords(&h, &[2, 10, 16]), Some(vec![1, 1, 1]));
        assert_eq!(hnf_coords(&h, &[1, 0, 0]), None);
    }
}
