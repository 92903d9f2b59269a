use super::{Conductance, GraphError, VertexId, WeightedGraph};

/// Which family a [`TreeGraph`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    /// `A_n`: the root and every internal vertex have `d - 1` children.
    Perfect,
    /// `T_n`: radius-`n` ball in the `d`-regular tree; the root has `d` children.
    Ball,
    Other,
}

/// Rooted tree with unit edge weights, vertices numbered breadth-first.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeGraph {
    kind: TreeKind,
    degree: usize,
    height: usize,
    parent: Vec<Option<VertexId>>,
    depth: Vec<usize>,
    children: Vec<Vec<VertexId>>,
}

impl TreeGraph {
    /// Perfect `(d-1)`-ary tree `A_n` of height `n`.
    pub fn perfect(d: usize, n: usize) -> Result<Self, GraphError> {
        check_degree(d)?;
        Ok(Self::grow(TreeKind::Perfect, d, n, |_| d - 1))
    }

    /// Ball `T_n` of radius `n` around a vertex of the `d`-regular tree.
    pub fn ball(d: usize, n: usize) -> Result<Self, GraphError> {
        check_degree(d)?;
        Ok(Self::grow(TreeKind::Ball, d, n, |depth| if depth == 0 { d } else { d - 1 }))
    }

    /// Builds a tree from a parent array. The root must be vertex 0 and every
    /// parent must precede its child, which makes the numbering breadth- or
    /// depth-first; `children` keeps the given order.
    pub fn from_parents(parents: &[Option<VertexId>]) -> Result<Self, GraphError> {
        let n = parents.len();
        if n == 0 {
            return Err(GraphError::Parse { line: 0, message: "empty tree".into() });
        }
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            match (v, p) {
                (0, None) => {}
                (0, Some(_)) | (_, None) => {
                    return Err(GraphError::Parse {
                        line: v,
                        message: "vertex 0 must be the unique root".into(),
                    })
                }
                (_, Some(p)) if *p >= v => {
                    return Err(GraphError::Parse {
                        line: v,
                        message: format!("parent {p} does not precede vertex {v}"),
                    })
                }
                (_, Some(p)) => {
                    depth[v] = depth[*p] + 1;
                    children[*p].push(v);
                }
            }
        }
        let height = depth.iter().copied().max().unwrap_or(0);
        let degree = (0..n).map(|v| children[v].len() + usize::from(v != 0)).max().unwrap_or(0);
        Ok(Self {
            kind: TreeKind::Other,
            degree,
            height,
            parent: parents.to_vec(),
            depth,
            children,
        })
    }

    fn grow(kind: TreeKind, d: usize, n: usize, fanout: impl Fn(usize) -> usize) -> Self {
        let mut parent = vec![None];
        let mut depth = vec![0];
        let mut children = vec![Vec::new()];
        let mut frontier = vec![0];
        for level in 0..n {
            let mut next = Vec::with_capacity(frontier.len() * (d - 1));
            for &v in &frontier {
                for _ in 0..fanout(level) {
                    let id = parent.len();
                    parent.push(Some(v));
                    depth.push(level + 1);
                    children.push(Vec::new());
                    children[v].push(id);
                    next.push(id);
                }
            }
            frontier = next;
        }
        Self { kind, degree: d, height: n, parent, depth, children }
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    /// The `d` of the ambient regular tree (maximum degree for [`TreeKind::Other`]).
    pub fn degree_parameter(&self) -> usize {
        self.degree
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    /// Parent-child pairs in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v)))
    }

    /// Vertices on the tree path from `a` to `b`, both included.
    pub fn path(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let (mut x, mut y) = (a, b);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[x] > self.depth[y] {
            up.push(x);
            x = self.parent[x].expect("deeper vertex has a parent");
        }
        while self.depth[y] > self.depth[x] {
            down.push(y);
            y = self.parent[y].expect("deeper vertex has a parent");
        }
        while x != y {
            up.push(x);
            down.push(y);
            x = self.parent[x].expect("non-root");
            y = self.parent[y].expect("non-root");
        }
        up.push(x);
        up.extend(down.into_iter().rev());
        up
    }

    /// Unit-weight graph on the same vertex ids.
    pub fn to_graph<W: Conductance>(&self) -> WeightedGraph<W> {
        WeightedGraph::from_edges(self.vertex_count(), self.edges().map(|(p, v)| (p, v, W::one())))
            .expect("tree edges are valid")
    }
}

fn check_degree(d: usize) -> Result<(), GraphError> {
    if d < 3 {
        Err(GraphError::InvalidDegree(d))
    } else {
        Ok(())
    }
}
