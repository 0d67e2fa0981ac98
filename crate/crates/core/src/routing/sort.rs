use super::Swap;

/// Odd-even transposition sort of `keys` in place. Returns the non-empty
/// phases as layers of local position pairs `(i, i + 1)`.
pub(crate) fn odd_even_layers(keys: &mut [usize]) -> Vec<Vec<Swap>> {
    let n = keys.len();
    let mut layers = Vec::new();
    let mut quiet = 0;
    let mut phase = 0;
    while quiet < 2 && n > 1 {
        let mut layer = Vec::new();
        let mut i = phase % 2;
        while i + 1 < n {
            if keys[i] > keys[i + 1] {
                keys.swap(i, i + 1);
                layer.push((i, i + 1));
            }
            i += 2;
        }
        if layer.is_empty() {
            quiet += 1;
        } else {
            quiet = 0;
            layers.push(layer);
        }
        phase += 1;
    }
    layers
}

/// Runs independent sorts on disjoint position sets and merges their phases.
/// `lines[c]` lists the global positions of line `c` in order and `keys[c]`
/// its current keys.
pub(crate) fn parallel_sorts(lines: &[Vec<usize>], keys: &mut [Vec<usize>]) -> Vec<Vec<Swap>> {
    let mut merged: Vec<Vec<Swap>> = Vec::new();
    for (line, k) in lines.iter().zip(keys.iter_mut()) {
        for (depth, layer) in odd_even_layers(k).into_iter().enumerate() {
            if merged.len() <= depth {
                merged.push(Vec::new());
            }
            merged[depth].extend(layer.into_iter().map(|(a, b)| (line[a], line[b])));
        }
    }
    merged
}
