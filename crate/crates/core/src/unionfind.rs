/// Disjoint sets over `0..n` whose representative is always the smallest member.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        let mut root = a;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[a] != root {
            let next = self.parent[a];
            self.parent[a] = root;
            a = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Class index of every member; classes are numbered by their smallest member.
    pub fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut class_of_root = vec![usize::MAX; n];
        let mut next = 0;
        let mut out = vec![0; n];
        for i in 0..n {
            let r = self.find(i);
            if class_of_root[r] == usize::MAX {
                class_of_root[r] = next;
                next += 1;
            }
            out[i] = class_of_root[r];
        }
        (out, next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_member_represents() {
        let mut uf = UnionFind::new(5);
        uf.union(4, 2);
        uf.union(2, 3);
        assert_eq!(uf.find(4), 2);
        assert!(!uf.union(3, 4));
        let (classes, n) = uf.classes();
        assert_eq!(n, 3);
        assert_eq!(classes, vec![0, 1, 2, 2, 2]);
    }
}
