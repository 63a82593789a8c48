use std::sync::atomic::{AtomicUsize, Ordering};

use super::LinearMap;

/// Wraps an operator and counts forward and adjoint applications.
#[derive(Debug)]
pub struct CountingMap<M> {
    inner: M,
    forward: AtomicUsize,
    adjoint: AtomicUsize,
}

impl<M: LinearMap> CountingMap<M> {
    pub fn new(inner: M) -> Self {
        Self {
            inner,
            forward: AtomicUsize::new(0),
            adjoint: AtomicUsize::new(0),
        }
    }

    pub fn forward_count(&self) -> usize {
        self.forward.load(Ordering::Relaxed)
    }

    pub fn adjoint_count(&self) -> usize {
        self.adjoint.load(Ordering::Relaxed)
    }

    pub fn total(&self) -> usize {
        self.forward_count() + self.adjoint_count()
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: LinearMap> LinearMap for CountingMap<M> {
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        self.forward.fetch_add(1, Ordering::Relaxed);
        self.inner.forward_into(x, out)
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.adjoint.fetch_add(1, Ordering::Relaxed);
        self.inner.adjoint_into(y, out)
    }
}
