//! Recursive column sort on hypercubic grids.
//!
//! Axis 0 is the column axis: position `k` sits in column `k / s0` at row
//! `k % s0`. A permutation is routed by (1) marking every token so that each
//! column and each destination column holds every mark once, (2) sorting
//! every column by mark, (3) routing each row stratum to the destination
//! columns on the remaining `d - 1` axes, (4) sorting every column by
//! destination row.

use super::sort::{odd_even_layers, parallel_sorts};
use super::{Architecture, Swap, SwapSchedule};
use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Marks in `0..rows` for a layout of `columns` columns of `rows` positions.
///
/// Built by transpositions from the identity arrangement (mark = row),
/// repairing the marking after each one. A repair that cannot be done
/// locally flips the two marks involved along an alternating chain.
pub fn build_marking(p: &Permutation, columns: usize, rows: usize) -> Result<Vec<usize>> {
    let n = p.len();
    if columns == 0 || rows == 0 || columns * rows != n {
        return Err(Error::Shape(format!(
            "{columns} columns of {rows} rows do not hold {n} elements"
        )));
    }
    let mut marks: Vec<usize> = (0..n).map(|k| k % rows).collect();
    let mut dest: Vec<usize> = (0..n).collect();
    let mut holder: Vec<usize> = (0..n).collect();
    let col = |k: usize| k / rows;

    for a in 0..n {
        let target = p.apply(a);
        if dest[a] == target {
            continue;
        }
        let b = holder[target];
        let (ga, gb) = (dest[a] / rows, dest[b] / rows);
        holder[dest[a]] = b;
        holder[target] = a;
        dest.swap(a, b);

        let (ma, mb) = (marks[a], marks[b]);
        if col(a) == col(b) {
            marks.swap(a, b);
            continue;
        }
        if ga == gb || ma == mb {
            continue;
        }
        // a now carries mb into group gb, freeing ma there; column col(a)
        // holds mb twice and group ga holds mb twice. Walk the chain of
        // ma/mb edges from col(a) until it closes at ga.
        marks[a] = mb;
        let mut token = a;
        let mut on_left = true;
        let mut vertex = col(a);
        let (mut look, mut flip_to) = (mb, ma);
        for _ in 0..=2 * n {
            let next = (0..n).find(|&t| {
                t != token
                    && marks[t] == look
                    && if on_left { col(t) == vertex } else { dest[t] / rows == vertex }
            });
            let Some(t) = next else {
                break;
            };
            marks[t] = flip_to;
            token = t;
            on_left = !on_left;
            vertex = if on_left { col(t) } else { dest[t] / rows };
            if !on_left && vertex == ga {
                break;
            }
            std::mem::swap(&mut look, &mut flip_to);
        }
    }
    debug_assert!(check_marking(p, rows, &marks));
    Ok(marks)
}

/// Both marking properties: each column, and each set of elements bound for
/// the same destination column, carries every mark exactly once.
pub fn check_marking(p: &Permutation, rows: usize, marks: &[usize]) -> bool {
    let n = p.len();
    if rows == 0 || n % rows != 0 || marks.len() != n || marks.iter().any(|&m| m >= rows) {
        return false;
    }
    let cols = n / rows;
    let mut by_col = vec![false; n];
    let mut by_dest = vec![false; n];
    for (k, &m) in marks.iter().enumerate() {
        let c = (k / rows) * rows + m;
        let g = (p.apply(k) / rows) * rows + m;
        if by_col[c] || by_dest[g] {
            return false;
        }
        by_col[c] = true;
        by_dest[g] = true;
    }
    debug_assert_eq!(by_col.len(), cols * rows);
    true
}

pub fn decompose_grid(p: &Permutation, arch: &Architecture) -> Result<SwapSchedule> {
    let sides = match arch {
        Architecture::Grid { sides } => sides.clone(),
        Architecture::Line => vec![p.len()],
        Architecture::FullyConnected => {
            return Err(Error::Parameter("grid decomposition on a fully connected architecture".into()))
        }
    };
    arch.check_size(p.len())?;
    let layers = route(p.image(), &sides)?;
    SwapSchedule::new(p.len(), layers)
}

fn apply_layers(layers: &[Vec<Swap>], values: &mut [usize]) {
    for &(a, b) in layers.iter().flatten() {
        values.swap(a, b);
    }
}

/// Layers moving the token at `k` to `dest[k]` on a grid with `sides`.
fn route(dest: &[usize], sides: &[usize]) -> Result<Vec<Vec<Swap>>> {
    let n = dest.len();
    let s0 = sides[0];
    if sides.len() == 1 {
        return Ok(odd_even_layers(&mut dest.to_vec()));
    }
    let columns = n / s0;
    let perm = Permutation::new(dest.to_vec())?;
    let mut marks = build_marking(&perm, columns, s0)?;
    let mut cur = dest.to_vec();

    let lines: Vec<Vec<usize>> = (0..columns).map(|c| (c * s0..(c + 1) * s0).collect()).collect();
    let mut keys: Vec<Vec<usize>> = lines.iter().map(|l| l.iter().map(|&k| marks[k]).collect()).collect();
    let mut by_mark = parallel_sorts(&lines, &mut keys);
    apply_layers(&by_mark, &mut cur);
    apply_layers(&by_mark, &mut marks);

    let mut strata: Vec<Vec<Swap>> = Vec::new();
    for row in 0..s0 {
        let sub: Vec<usize> = (0..columns).map(|c| cur[row + s0 * c] / s0).collect();
        for (depth, layer) in route(&sub, &sides[1..])?.into_iter().enumerate() {
            if strata.len() <= depth {
                strata.push(Vec::new());
            }
            strata[depth].extend(layer.into_iter().map(|(a, b)| (row + s0 * a, row + s0 * b)));
        }
    }
    apply_layers(&strata, &mut cur);

    let mut keys: Vec<Vec<usize>> = lines.iter().map(|l| l.iter().map(|&k| cur[k] % s0).collect()).collect();
    let by_row = parallel_sorts(&lines, &mut keys);

    by_mark.extend(strata);
    by_mark.extend(by_row);
    Ok(by_mark)
}
