//! Planar genealogical trees in a flat arena.

pub type NodeId = usize;

/// One particle; children are stored in planar order, the first child being
/// the first daughter (the one whose type depends on the mother's).
#[derive(Debug, Clone)]
pub struct Node {
    pub ty: usize,
    pub birth: u32,
    pub children: Vec<NodeId>,
}

/// A rooted planar tree stopped at `horizon`.
#[derive(Debug, Clone)]
pub struct PlanarTree {
    nodes: Vec<Node>,
    horizon: u32,
}

impl PlanarTree {
    pub fn new(root_type: usize, horizon: u32) -> Self {
        PlanarTree {
            nodes: vec![Node {
                ty: root_type,
                birth: 0,
                children: Vec::new(),
            }],
            horizon,
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn add_child(&mut self, parent: NodeId, ty: usize) -> NodeId {
        let birth = self.nodes[parent].birth + 1;
        let id = self.nodes.len();
        self.nodes.push(Node {
            ty,
            birth,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Particle counts per generation and type, `counts[k][j]`.
    pub fn generation_counts(&self, type_count: usize) -> Vec<Vec<u64>> {
        let mut counts = vec![vec![0u64; type_count]; self.horizon as usize + 1];
        for node in &self.nodes {
            counts[node.birth as usize][node.ty] += 1;
        }
        counts
    }

    /// Total particles per generation.
    pub fn generation_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.horizon as usize + 1];
        for node in &self.nodes {
            totals[node.birth as usize] += 1;
        }
        totals
    }

    /// Structural equality: same shapes, types and planar order, regardless
    /// of arena numbering.
    pub fn same_shape(&self, other: &PlanarTree) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut stack = vec![(self.root(), other.root())];
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (self.node(a), other.node(b));
            if na.ty != nb.ty || na.birth != nb.birth || na.children.len() != nb.children.len() {
                return false;
            }
            stack.extend(na.children.iter().copied().zip(nb.children.iter().copied()));
        }
        true
    }
}

impl PartialEq for PlanarTree {
    fn eq(&self, other: &Self) -> bool {
        self.horizon == other.horizon && self.same_shape(other)
    }
}
