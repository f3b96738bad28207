//! Uniform-grid index for nearest-site queries in a square domain.

/// Bucket grid over `[−half_width, half_width]²` stored in CSR form.
#[derive(Debug, Clone)]
pub struct GridIndex {
    half_width: f64,
    cell: f64,
    n: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    /// Indexes `sites`, all of which must lie in the square; aims for about
    /// two sites per bucket.
    pub fn new(sites: &[[f64; 2]], half_width: f64) -> Self {
        let n = (((sites.len() as f64) / 2.0).sqrt().ceil() as usize).max(1);
        let cell = 2.0 * half_width / n as f64;
        let mut counts = vec![0u32; n * n + 1];
        let keys: Vec<usize> = sites
            .iter()
            .map(|p| {
                let (i, j) = Self::bucket_of(p, half_width, cell, n);
                j * n + i
            })
            .collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; sites.len()];
        for (idx, &k) in keys.iter().enumerate() {
            items[fill[k] as usize] = idx as u32;
            fill[k] += 1;
        }
        Self {
            half_width,
            cell,
            n,
            starts: counts,
            items,
        }
    }

    fn bucket_of(p: &[f64; 2], half_width: f64, cell: f64, n: usize) -> (usize, usize) {
        let clamp = |v: f64| (((v + half_width) / cell).floor().max(0.0) as usize).min(n - 1);
        (clamp(p[0]), clamp(p[1]))
    }

    /// Index of the site nearest to `q`; ties go to the lower index.
    pub fn nearest(&self, sites: &[[f64; 2]], q: [f64; 2]) -> Option<usize> {
        if sites.is_empty() {
            return None;
        }
        let (ci, cj) = Self::bucket_of(&q, self.half_width, self.cell, self.n);
        let mut best = usize::MAX;
        let mut best_d2 = f64::INFINITY;
        let n = self.n as isize;
        for ring in 0..=n {
            let lo_i = ci as isize - ring;
            let hi_i = ci as isize + ring;
            let lo_j = cj as isize - ring;
            let hi_j = cj as isize + ring;
            for j in lo_j..=hi_j {
                if j < 0 || j >= n {
                    continue;
                }
                let on_edge_row = j == lo_j || j == hi_j;
                let mut i = lo_i;
                while i <= hi_i {
                    if i >= 0 && i < n {
                        let b = j as usize * self.n + i as usize;
                        for &s in &self.items[self.starts[b] as usize..self.starts[b + 1] as usize] {
                            let p = sites[s as usize];
                            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                            let s = s as usize;
                            if d2 < best_d2 || (d2 == best_d2 && s < best) {
                                best_d2 = d2;
                                best = s;
                            }
                        }
                    }
                    // interior rows only touch the two boundary columns
                    i += if on_edge_row || ring == 0 { 1 } else { 2 * ring };
                }
            }
            // everything outside this ring is at least `ring · cell` away
            let reach = ring as f64 * self.cell;
            if best != usize::MAX && best_d2 <= reach * reach {
                break;
            }
        }
        Some(best)
    }
}
