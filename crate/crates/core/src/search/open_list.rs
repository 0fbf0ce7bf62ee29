use std::cmp::Ordering;
use std::collections::hash_map::Entry as MapEntry;
use std::collections::{BinaryHeap, HashMap};

use crate::grid_map::Node;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub parent: Node,
    pub g: f64,
    pub h: f64,
    pub closed: bool,
}

/// What [`OpenList::refresh`] did with an offered node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refresh {
    Inserted,
    Updated,
    /// The stored cost was no worse.
    Kept,
    /// Closed nodes are never updated.
    Closed,
}

#[derive(Clone, Copy, Debug)]
struct Keyed {
    f: f64,
    h: f64,
    g: f64,
    node: Node,
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Keyed {}

impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Keyed {
    // reversed: BinaryHeap is a max-heap and we want the smallest key on top
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(other.h.total_cmp(&self.h))
            .then(other.node.cmp(&self.node))
            .then(self.g.total_cmp(&other.g))
    }
}

/// Node table with open/closed status and a lazily pruned priority queue.
///
/// Selection order is smallest `g + h`, then smallest `h`, then `(x, y)`.
/// Superseded heap entries are skipped when popped.
#[derive(Debug, Default)]
pub struct OpenList {
    entries: HashMap<Node, Entry>,
    heap: BinaryHeap<Keyed>,
    order: Vec<Node>,
}

impl OpenList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, node: Node, parent: Node, g: f64, h: f64) -> Refresh {
        self.refresh(node, parent, g, h)
    }

    /// Inserts `node`, or lowers its cost if `g` improves on the stored one.
    pub fn refresh(&mut self, node: Node, parent: Node, g: f64, h: f64) -> Refresh {
        let outcome = match self.entries.entry(node) {
            MapEntry::Vacant(slot) => {
                slot.insert(Entry {
                    parent,
                    g,
                    h,
                    closed: false,
                });
                self.order.push(node);
                Refresh::Inserted
            }
            MapEntry::Occupied(mut slot) => {
                let e = slot.get_mut();
                if e.closed {
                    return Refresh::Closed;
                }
                if g >= e.g {
                    return Refresh::Kept;
                }
                e.g = g;
                e.h = h;
                e.parent = parent;
                Refresh::Updated
            }
        };
        self.heap.push(Keyed {
            f: g + h,
            h,
            g,
            node,
        });
        outcome
    }

    /// Removes and returns the best open node without closing it.
    pub fn pop(&mut self) -> Option<Node> {
        while let Some(k) = self.heap.pop() {
            let e = &self.entries[&k.node];
            if !e.closed && e.g == k.g {
                return Some(k.node);
            }
        }
        None
    }

    pub fn close(&mut self, node: Node) {
        if let Some(e) = self.entries.get_mut(&node) {
            e.closed = true;
        }
    }

    pub fn get(&self, node: Node) -> Option<&Entry> {
        self.entries.get(&node)
    }

    pub fn is_closed(&self, node: Node) -> bool {
        self.entries.get(&node).is_some_and(|e| e.closed)
    }

    /// Distinct nodes ever inserted.
    pub fn evaluated(&self) -> usize {
        self.order.len()
    }

    /// Inserted nodes in insertion order.
    pub fn insertion_order(&self) -> &[Node] {
        &self.order
    }

    /// Parent chain from `start` to `goal`, or `None` if `goal` was never
    /// reached.
    pub fn path_to(&self, goal: Node) -> Option<Vec<Node>> {
        let mut path = vec![goal];
        let mut cur = goal;
        loop {
            let e = self.entries.get(&cur)?;
            if e.parent == cur {
                break;
            }
            cur = e.parent;
            path.push(cur);
            if path.len() > self.entries.len() + 1 {
                return None;
            }
        }
        path.reverse();
        Some(path)
    }
}
