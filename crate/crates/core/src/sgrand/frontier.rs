//! Candidate sets for best-first search.
//!
//! Both backings order patterns by [`ErrorPattern::search_cmp`]. The array
//! backing scans for the minimum on every pop (quadratic in the number of
//! tests overall); the heap backing is a binary min-heap stored level by
//! level in a vector.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::eptree::ErrorPattern;
use crate::error::Error;

pub trait Frontier {
    fn push(&mut self, e: ErrorPattern);
    fn pop_min(&mut self) -> Option<ErrorPattern>;
    fn peek_min(&self) -> Option<&ErrorPattern>;
    fn len(&self) -> usize;
    fn clear(&mut self);
    /// Contents in storage order.
    fn as_slice(&self) -> &[ErrorPattern];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Soft weight of the minimum, `inf` when empty.
    fn min_zeta(&self) -> f64 {
        self.peek_min().map_or(f64::INFINITY, |e| e.zeta())
    }

    /// Contents in search order.
    fn sorted(&self) -> Vec<ErrorPattern> {
        let mut v = self.as_slice().to_vec();
        v.sort_by(|a, b| a.search_cmp(b));
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backing {
    Array,
    #[default]
    Heap,
}

impl FromStr for Backing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "array" => Ok(Backing::Array),
            "heap" => Ok(Backing::Heap),
            _ => Err(Error::Config(format!("unknown frontier backing '{s}'"))),
        }
    }
}

impl fmt::Display for Backing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backing::Array => "array",
            Backing::Heap => "heap",
        })
    }
}

/// Unsorted vector with a linear minimum scan.
#[derive(Debug, Clone, Default)]
pub struct ArrayFrontier {
    items: Vec<ErrorPattern>,
}

impl ArrayFrontier {
    pub fn new() -> Self {
        Self::default()
    }

    fn min_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, e) in self.items.iter().enumerate() {
            match best {
                Some(b) if e.search_cmp(&self.items[b]) != Ordering::Less => {}
                _ => best = Some(i),
            }
        }
        best
    }
}

impl Frontier for ArrayFrontier {
    fn push(&mut self, e: ErrorPattern) {
        self.items.push(e);
    }

    fn pop_min(&mut self) -> Option<ErrorPattern> {
        let i = self.min_index()?;
        Some(self.items.swap_remove(i))
    }

    fn peek_min(&self) -> Option<&ErrorPattern> {
        self.min_index().map(|i| &self.items[i])
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn clear(&mut self) {
        self.items.clear();
    }

    fn as_slice(&self) -> &[ErrorPattern] {
        &self.items
    }
}

/// Binary min-heap: node `i` has children `2i + 1` and `2i + 2`.
#[derive(Debug, Clone, Default)]
pub struct HeapFrontier {
    items: Vec<ErrorPattern>,
}

impl HeapFrontier {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adopts `items` as a heap layout verbatim. Returns `None` if the layout
    /// violates the heap property.
    pub fn from_layout(items: Vec<ErrorPattern>) -> Option<Self> {
        let heap = Self { items };
        heap.is_heap().then_some(heap)
    }

    /// Builds a heap from arbitrary items in linear time.
    pub fn heapify(items: Vec<ErrorPattern>) -> Self {
        let mut heap = Self { items };
        for i in (0..heap.items.len() / 2).rev() {
            heap.sift_down(i);
        }
        heap
    }

    pub fn is_heap(&self) -> bool {
        (1..self.items.len())
            .all(|i| self.items[(i - 1) / 2].search_cmp(&self.items[i]) != Ordering::Greater)
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.items[a].search_cmp(&self.items[b]) == Ordering::Less
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(i, parent) {
                break;
            }
            self.items.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let len = self.items.len();
        loop {
            let left = 2 * i + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.less(right, left) {
                right
            } else {
                left
            };
            if !self.less(child, i) {
                break;
            }
            self.items.swap(i, child);
            i = child;
        }
    }
}

impl Frontier for HeapFrontier {
    fn push(&mut self, e: ErrorPattern) {
        self.items.push(e);
        self.sift_up(self.items.len() - 1);
    }

    fn pop_min(&mut self) -> Option<ErrorPattern> {
        if self.items.is_empty() {
            return None;
        }
        let min = self.items.swap_remove(0);
        if !self.items.is_empty() {
            self.sift_down(0);
        }
        Some(min)
    }

    fn peek_min(&self) -> Option<&ErrorPattern> {
        self.items.first()
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn clear(&mut self) {
        self.items.clear();
    }

    fn as_slice(&self) -> &[ErrorPattern] {
        &self.items
    }
}

/// Either backing, chosen at run time.
#[derive(Debug, Clone)]
pub enum AnyFrontier {
    Array(ArrayFrontier),
    Heap(HeapFrontier),
}

impl AnyFrontier {
    pub fn new(backing: Backing) -> Self {
        match backing {
            Backing::Array => AnyFrontier::Array(ArrayFrontier::new()),
            Backing::Heap => AnyFrontier::Heap(HeapFrontier::new()),
        }
    }

    pub fn from_items(backing: Backing, items: Vec<ErrorPattern>) -> Self {
        match backing {
            Backing::Array => AnyFrontier::Array(ArrayFrontier { items }),
            Backing::Heap => AnyFrontier::Heap(HeapFrontier::heapify(items)),
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $f:ident $(, $arg:expr)*) => {
        match $self {
            AnyFrontier::Array(a) => a.$f($($arg),*),
            AnyFrontier::Heap(h) => h.$f($($arg),*),
        }
    };
}

impl Frontier for AnyFrontier {
    fn push(&mut self, e: ErrorPattern) {
        dispatch!(self, push, e)
    }

    fn pop_min(&mut self) -> Option<ErrorPattern> {
        dispatch!(self, pop_min)
    }

    fn peek_min(&self) -> Option<&ErrorPattern> {
        dispatch!(self, peek_min)
    }

    fn len(&self) -> usize {
        dispatch!(self, len)
    }

    fn clear(&mut self) {
        dispatch!(self, clear)
    }

    fn as_slice(&self) -> &[ErrorPattern] {
        dispatch!(self, as_slice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVec;
    use crate::channel::ReliabilityProfile;
    use crate::code::LinearCode;
    use crate::eptree::EpTree;

    fn setup() -> (ReliabilityProfile, LinearCode) {
        let profile =
            ReliabilityProfile::new(vec![1.2, 2.1, 0.8, 3.4], BitVec::zeros(4)).unwrap();
        let code = LinearCode::bch(7, 4).unwrap();
        let rows = code
            .rows()
            .iter()
            .map(|r| BitVec::from_ones(4, r.iter_ones().filter(|&i| i < 4)))
            .collect();
        let code = LinearCode::from_parity_check(4, rows, Some(1), "t".into()).unwrap();
        (profile, code)
    }

    fn node(tree: &EpTree<'_>, s: &str) -> ErrorPattern {
        tree.node_from_bits(&BitVec::parse(s).unwrap())
    }

    fn layout(heap: &HeapFrontier, tree: &EpTree<'_>) -> Vec<(String, f64)> {
        heap.as_slice()
            .iter()
            .map(|e| {
                let z = (e.zeta() * 10.0).round() / 10.0;
                (e.to_bits(tree.profile()).to_string(), z)
            })
            .collect()
    }

    #[test]
    fn heap_operations_at_t6() {
        let (p, c) = setup();
        let tree = EpTree::new(&p, &c).unwrap();
        let start = ["0110", "1100", "0101", "0001", "1110"]
            .iter()
            .map(|s| node(&tree, s))
            .collect();
        let mut heap = HeapFrontier::from_layout(start).expect("valid layout");
        let popped = heap.pop_min().unwrap();
        assert_eq!(popped.to_bits(&p).to_string(), "0110");
        assert_eq!(
            layout(&heap, &tree),
            vec![
                ("1100".into(), 3.3),
                ("0001".into(), 3.4),
                ("0101".into(), 5.5),
                ("1110".into(), 4.1)
            ]
        );
        for child in tree.children(&popped) {
            heap.push(child);
        }
        assert_eq!(
            layout(&heap, &tree),
            vec![
                ("1100".into(), 3.3),
                ("0001".into(), 3.4),
                ("0101".into(), 5.5),
                ("1110".into(), 4.1),
                ("0011".into(), 4.2),
                ("0111".into(), 6.3)
            ]
        );
        assert!(heap.is_heap());
    }

    #[test]
    fn from_layout_rejects_non_heap() {
        let (p, c) = setup();
        let tree = EpTree::new(&p, &c).unwrap();
        let bad = vec![node(&tree, "1100"), node(&tree, "0110")];
        assert!(HeapFrontier::from_layout(bad).is_none());
    }

    #[test]
    fn backings_pop_in_same_order() {
        let (p, c) = setup();
        let tree = EpTree::new(&p, &c).unwrap();
        let all: Vec<ErrorPattern> = (0..16u32)
            .map(|m| tree.node_from_bits(&BitVec::from_ones(4, (0..4).filter(|i| m >> i & 1 == 1))))
            .collect();
        let mut array = ArrayFrontier::new();
        let mut heap = HeapFrontier::new();
        for e in all.iter().rev() {
            array.push(e.clone());
            heap.push(e.clone());
        }
        let mut prev: Option<ErrorPattern> = None;
        while let Some(a) = array.pop_min() {
            let h = heap.pop_min().unwrap();
            assert_eq!(a.ranked_bits(), h.ranked_bits());
            if let Some(prev) = prev {
                assert_eq!(prev.search_cmp(&a), Ordering::Less);
            }
            prev = Some(a);
        }
        assert!(heap.is_empty());
    }

    #[test]
    fn heapify_orders() {
        let (p, c) = setup();
        let tree = EpTree::new(&p, &c).unwrap();
        let items = ["1110", "0001", "0010", "0101", "1000"]
            .iter()
            .map(|s| node(&tree, s))
            .collect();
        let mut heap = HeapFrontier::heapify(items);
        assert!(heap.is_heap());
        assert_eq!(heap.pop_min().unwrap().to_bits(&p).to_string(), "0010");
        assert_eq!(heap.min_zeta(), 1.2);
    }

    #[test]
    fn empty_frontier() {
        let mut f = AnyFrontier::new(Backing::Array);
        assert!(f.pop_min().is_none());
        assert_eq!(f.min_zeta(), f64::INFINITY);
        assert_eq!("heap".parse::<Backing>().unwrap(), Backing::Heap);
        assert!("list".parse::<Backing>().is_err());
    }
}
