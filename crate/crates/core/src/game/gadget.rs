use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Vertex ids of the named parts of [`figure1_gadget`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetLabels {
    pub c1: Vec<usize>,
    pub c2: Vec<usize>,
    pub a1: usize,
    pub a2: usize,
    pub b1: usize,
    pub u: usize,
}

/// A graph whose only pure equilibrium is not a maximal perfect dominated set.
///
/// Two independent sets `C1`, `C2` of `c_size` vertices; `a1` is joined to
/// all of `C1`, `a2` to all of `C2`; `b1` is joined to `a1`, `a2` and `u`.
/// Numbering: `C1`, then `C2`, then `a1, a2, b1, u`.
///
/// Broadcasting `{a1, a2}` reaches all of `C1 ∪ C2` and is stable: `b1`
/// hears both, so joining would earn `b1` only `1 - 2`. Adding `b1` gains
/// `u`, and `{a1, a2, b1}` admits no improving addition or deletion.
pub fn figure1_gadget(c_size: usize) -> Result<(Graph, GadgetLabels)> {
    if c_size == 0 {
        return Err(Error::invalid("gadget needs c_size >= 1"));
    }
    let c1: Vec<usize> = (0..c_size).collect();
    let c2: Vec<usize> = (c_size..2 * c_size).collect();
    let (a1, a2, b1, u) = (2 * c_size, 2 * c_size + 1, 2 * c_size + 2, 2 * c_size + 3);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(2 * c_size + 3);
    edges.extend(c1.iter().map(|&c| (c, a1)));
    edges.extend(c2.iter().map(|&c| (c, a2)));
    edges.extend([(a1, b1), (a2, b1), (b1, u)]);
    let g = Graph::from_edges(2 * c_size + 4, &edges)?;
    Ok((
        g,
        GadgetLabels {
            c1,
            c2,
            a1,
            a2,
            b1,
            u,
        },
    ))
}
