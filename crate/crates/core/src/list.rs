//! Persistent singly linked lists used for machine environments and stacks.

use std::fmt;
use std::sync::Arc;

struct Node<T> {
    head: T,
    tail: List<T>,
}

/// An immutable cons list with O(1) `cons`, `uncons` and `clone`.
///
/// Tails are shared between all lists built on top of them, so a machine
/// transition that pushes or pops a frame never copies the rest of the stack.
pub struct List<T>(Option<Arc<Node<T>>>);

impl<T> List<T> {
    pub const fn nil() -> Self {
        List(None)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn cons(&self, head: T) -> Self {
        List(Some(Arc::new(Node {
            head,
            tail: self.clone(),
        })))
    }

    pub fn head(&self) -> Option<&T> {
        self.0.as_deref().map(|n| &n.head)
    }

    pub fn tail(&self) -> Option<&List<T>> {
        self.0.as_deref().map(|n| &n.tail)
    }

    pub fn uncons(&self) -> Option<(&T, &List<T>)> {
        self.0.as_deref().map(|n| (&n.head, &n.tail))
    }

    pub fn get(&self, index: usize) -> Option<&T> {
        self.iter().nth(index)
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    /// Whether the list has at least `n` elements, walking at most `n` nodes.
    pub fn has_at_least(&self, n: usize) -> bool {
        n == 0 || self.iter().nth(n - 1).is_some()
    }

    pub fn iter(&self) -> Iter<'_, T> {
        Iter(self.0.as_deref())
    }

    /// Whether both lists are the same node (or both empty).
    pub fn ptr_eq(&self, other: &List<T>) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Address of the first node, or 0 for the empty list. Only meaningful
    /// while the list is alive.
    pub fn addr(&self) -> usize {
        self.0.as_ref().map_or(0, |n| Arc::as_ptr(n) as usize)
    }

    /// Iterates over every suffix of the list, starting with the list itself
    /// and ending with the last non-empty tail.
    pub fn suffixes(&self) -> Suffixes<'_, T> {
        Suffixes(Some(self))
    }
}

impl<T: Clone> List<T> {
    pub fn from_vec(items: Vec<T>) -> Self {
        items
            .into_iter()
            .rev()
            .fold(List::nil(), |acc, item| acc.cons(item))
    }
}

impl<T> Clone for List<T> {
    fn clone(&self) -> Self {
        List(self.0.clone())
    }
}

impl<T> Default for List<T> {
    fn default() -> Self {
        List::nil()
    }
}

// Unlink uniquely owned nodes iteratively so long lists do not overflow the
// stack when they are dropped.
impl<T> Drop for List<T> {
    fn drop(&mut self) {
        let mut next = self.0.take();
        while let Some(node) = next {
            match Arc::try_unwrap(node) {
                Ok(mut node) => next = node.tail.0.take(),
                Err(_) => break,
            }
        }
    }
}

impl<T: PartialEq> PartialEq for List<T> {
    fn eq(&self, other: &Self) -> bool {
        let (mut a, mut b) = (self.0.as_ref(), other.0.as_ref());
        loop {
            match (a, b) {
                (None, None) => return true,
                (Some(x), Some(y)) => {
                    if Arc::ptr_eq(x, y) {
                        return true;
                    }
                    if x.head != y.head {
                        return false;
                    }
                    a = x.tail.0.as_ref();
                    b = y.tail.0.as_ref();
                }
                _ => return false,
            }
        }
    }
}

impl<T: Eq> Eq for List<T> {}

impl<T: fmt::Debug> fmt::Debug for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl<T: Clone> FromIterator<T> for List<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        List::from_vec(iter.into_iter().collect())
    }
}

pub struct Iter<'a, T>(Option<&'a Node<T>>);

impl<'a, T> Iterator for Iter<'a, T> {
    type Item = &'a T;

    fn next(&mut self) -> Option<&'a T> {
        let node = self.0?;
        self.0 = node.tail.0.as_deref();
        Some(&node.head)
    }
}

pub struct Suffixes<'a, T>(Option<&'a List<T>>);

impl<'a, T> Iterator for Suffixes<'a, T> {
    type Item = &'a List<T>;

    fn next(&mut self) -> Option<&'a List<T>> {
        let list = self.0?;
        self.0 = list.tail();
        if list.is_empty() {
            None
        } else {
            Some(list)
        }
    }
}

impl<'a, T> IntoIterator for &'a List<T> {
    type Item = &'a T;
    type IntoIter = Iter<'a, T>;

    fn into_iter(self) -> Iter<'a, T> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cons_shares_tail() {
        let base = List::from_vec(vec![2, 3]);
        let a = base.cons(1);
        let b = base.cons(1);
        assert_eq!(a, b);
        assert_eq!(a.iter().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.get(2), Some(&3));
        assert_eq!(a.get(3), None);
        assert_eq!(base.len(), 2);
    }

    #[test]
    fn suffixes_walk_every_tail() {
        let l = List::from_vec(vec!['a', 'b', 'c']);
        let heads: Vec<char> = l.suffixes().map(|s| *s.head().unwrap()).collect();
        assert_eq!(heads, vec!['a', 'b', 'c']);
        assert_eq!(List::<u8>::nil().suffixes().count(), 0);
    }

    #[test]
    fn long_list_drops_without_overflow() {
        let mut l = List::nil();
        for i in 0..1_000_000u32 {
            l = l.cons(i);
        }
        drop(l);
    }
}
