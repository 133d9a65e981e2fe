use crate::civector::Excitation;

fn ex(v: &[usize]) -> Excitation {
    Excitation::new(v.to_vec()).expect("generated excitations are well formed")
}

/// Spin-adapted singles and doubles from occupied to virtual orbitals.
///
/// Singles come first. Spin mirrors of a single share one parameter, as do
/// the alpha-alpha / beta-beta partners of a same-spin double and the two
/// spin-flipped images of an alpha-beta double.
pub fn generate_uccsd(n_orb: usize, n_elec: usize) -> (Vec<Excitation>, Vec<usize>) {
    let n = n_orb;
    let no = n_elec / 2;
    let nv = n - no;
    let bo = |i: usize| i;
    let bv = |a: usize| no + a;
    let ao = |i: usize| n + i;
    let av = |a: usize| n + no + a;

    let mut ops = Vec::new();
    let mut ids = Vec::new();
    let mut next = 0;
    let mut push = |group: Vec<Excitation>, ops: &mut Vec<Excitation>, ids: &mut Vec<usize>| {
        for e in group {
            ops.push(e);
            ids.push(next);
        }
        next += 1;
    };

    for i in 0..no {
        for a in 0..nv {
            push(vec![ex(&[av(a), ao(i)]), ex(&[bv(a), bo(i)])], &mut ops, &mut ids);
        }
    }
    for i in 0..no {
        for j in 0..i {
            for a in 0..nv {
                for b in 0..a {
                    push(
                        vec![ex(&[av(b), av(a), ao(i), ao(j)]), ex(&[bv(b), bv(a), bo(i), bo(j)])],
                        &mut ops,
                        &mut ids,
                    );
                }
            }
        }
    }
    for i in 0..no {
        for j in 0..=i {
            for a in 0..nv {
                for b in 0..=a {
                    if i == j && a == b {
                        push(vec![ex(&[bv(a), av(a), ao(i), bo(i)])], &mut ops, &mut ids);
                        continue;
                    }
                    push(
                        vec![ex(&[bv(b), av(a), ao(i), bo(j)]), ex(&[av(b), bv(a), bo(i), ao(j)])],
                        &mut ops,
                        &mut ids,
                    );
                    if i != j && a != b {
                        push(
                            vec![ex(&[bv(a), av(b), ao(i), bo(j)]), ex(&[av(a), bv(b), bo(i), ao(j)])],
                            &mut ops,
                            &mut ids,
                        );
                    }
                }
            }
        }
    }
    (ops, ids)
}

/// `k` layers of generalized singles and generalized paired doubles.
pub fn generate_kupccgsd(n_orb: usize, k: usize) -> (Vec<Excitation>, Vec<usize>) {
    let n = n_orb;
    let mut ops = Vec::new();
    let mut ids = Vec::new();
    let mut next = 0;
    for _ in 0..k {
        for p in 0..n {
            for q in 0..p {
                ops.push(ex(&[p + n, q + n]));
                ops.push(ex(&[p, q]));
                ids.extend([next, next]);
                next += 1;
            }
        }
        for p in 0..n {
            for q in 0..p {
                ops.push(ex(&[p + n, p, q, q + n]));
                ids.push(next);
                next += 1;
            }
        }
    }
    (ops, ids)
}

/// Paired doubles moving an electron pair from occupied `i` to virtual `a`.
pub fn generate_puccd(n_orb: usize, n_elec: usize) -> (Vec<Excitation>, Vec<usize>) {
    let n = n_orb;
    let no = n_elec / 2;
    let mut ops = Vec::new();
    for i in 0..no {
        for a in no..n {
            ops.push(ex(&[a + n, a, i, i + n]));
        }
    }
    let ids = (0..ops.len()).collect();
    (ops, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuples(ops: &[Excitation]) -> Vec<Vec<usize>> {
        ops.iter().map(|e| e.indices().to_vec()).collect()
    }

    #[test]
    fn h2_uccsd() {
        let (ops, ids) = generate_uccsd(2, 2);
        assert_eq!(tuples(&ops), vec![vec![3, 2], vec![1, 0], vec![1, 3, 2, 0]]);
        assert_eq!(ids, vec![0, 0, 1]);
    }

    #[test]
    fn h4_raw_counts() {
        let (ops, ids) = generate_uccsd(4, 4);
        assert_eq!(ops.len(), 26);
        assert_eq!(ids.iter().max().unwrap() + 1, 15);
        for e in &ops {
            e.validate(4).unwrap();
        }
    }

    #[test]
    fn h4_puccd() {
        let (ops, ids) = generate_puccd(4, 4);
        assert_eq!(
            tuples(&ops),
            vec![vec![6, 2, 0, 4], vec![7, 3, 0, 4], vec![6, 2, 1, 5], vec![7, 3, 1, 5]]
        );
        assert_eq!(ids, vec![0, 1, 2, 3]);
        let (ops, _) = generate_puccd(6, 4);
        assert_eq!(ops.len(), 2 * 4);
    }

    #[test]
    fn kupccgsd_counts() {
        let (ops, ids) = generate_kupccgsd(2, 1);
        assert_eq!(tuples(&ops), vec![vec![3, 2], vec![1, 0], vec![3, 1, 0, 2]]);
        assert_eq!(ids, vec![0, 0, 1]);
        let (ops2, ids2) = generate_kupccgsd(4, 2);
        let (ops1, ids1) = generate_kupccgsd(4, 1);
        assert_eq!(ops2.len(), 2 * ops1.len());
        assert_eq!(ids2.iter().max().unwrap() + 1, 2 * (ids1.iter().max().unwrap() + 1));
        for e in &ops2 {
            e.validate(4).unwrap();
        }
    }
}
