use super::{TransitionKernel, INDIFFERENCE_TOL, SPARSITY_ETA};
use crate::qsim::DenseMatrix;
use crate::scalar::Scalar;

/// Connected components of the bipartite graph linking input `x` to output
/// `y` whenever `|<y|U|x>| > eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    input_component: Vec<usize>,
    output_component: Vec<usize>,
    count: usize,
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

impl BlockStructure {
    pub fn of<T: Scalar>(u: &DenseMatrix<T>) -> Self {
        Self::with_threshold(u, SPARSITY_ETA)
    }

    pub fn with_threshold<T: Scalar>(u: &DenseMatrix<T>, eta: f64) -> Self {
        let n = u.dim();
        let mut parent: Vec<usize> = (0..2 * n).collect();
        for y in 0..n {
            for x in 0..n {
                if u.get(y, x).norm().as_f64() > eta {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, n + y));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        // relabel roots densely in order of first appearance
        let mut label = vec![usize::MAX; 2 * n];
        let mut count = 0;
        let mut comp = vec![0; 2 * n];
        for (i, c) in comp.iter_mut().enumerate() {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            *c = label[r];
        }
        let output_component = comp.split_off(n);
        BlockStructure {
            input_component: comp,
            output_component,
            count,
        }
    }

    pub fn component_count(&self) -> usize {
        self.count
    }

    pub fn input_component(&self, x: usize) -> usize {
        self.input_component[x]
    }

    pub fn output_component(&self, y: usize) -> usize {
        self.output_component[y]
    }

    pub fn connected(&self, x: usize, y: usize) -> bool {
        self.input_component[x] == self.output_component[y]
    }

    /// Input indices grouped by component, in component order.
    pub fn input_blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.count];
        for (x, &c) in self.input_component.iter().enumerate() {
            blocks[c].push(x);
        }
        blocks.retain(|b| !b.is_empty());
        blocks
    }
}

/// Every `(x, y)` with `K[x][y] > 1e-9` that crosses components of `U`.
pub fn check_indifference<T: Scalar>(
    kernel: &TransitionKernel<T>,
    u: &DenseMatrix<T>,
) -> Vec<(usize, usize)> {
    let blocks = BlockStructure::of(u);
    let mut out = Vec::new();
    for x in 0..kernel.dim() {
        for y in 0..kernel.dim() {
            if kernel.get(x, y).as_f64() > INDIFFERENCE_TOL && !blocks.connected(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}
