//! Byte accounting for index builds.
//!
//! Each engine owns a [`MemLedger`] and routes every heap buffer it keeps or
//! uses temporarily during construction through it. `live` is what the built
//! index holds; `peak` is the high-water mark seen during the build. Buffers
//! are charged by capacity, so growth slack counts. The caller's input slice
//! is never charged.

use std::mem::size_of;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct MemoryUsage {
    /// Bytes held by the index after construction.
    pub live_bytes: usize,
    /// Largest simultaneous allocation seen while building.
    pub peak_bytes: usize,
}

#[derive(Clone, Debug, Default)]
pub struct MemLedger {
    live: usize,
    peak: usize,
}

impl MemLedger {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn alloc(&mut self, bytes: usize) {
        self.live += bytes;
        self.peak = self.peak.max(self.live);
    }

    #[inline]
    pub fn free(&mut self, bytes: usize) {
        debug_assert!(bytes <= self.live, "freeing {bytes} of {} live bytes", self.live);
        self.live -= bytes;
    }

    pub fn vec_with_capacity<T>(&mut self, capacity: usize) -> Vec<T> {
        let v = Vec::with_capacity(capacity);
        self.alloc(vec_bytes(&v));
        v
    }

    /// Copies `src` into an exactly sized, charged buffer.
    pub fn copy_slice<T: Clone>(&mut self, src: &[T]) -> Vec<T> {
        let mut v = self.vec_with_capacity(src.len());
        v.extend_from_slice(src);
        v
    }

    /// Pushes onto a charged vector, accounting for reallocation: while the
    /// buffer grows both the old and the new allocation are live.
    #[inline]
    pub fn push<T>(&mut self, v: &mut Vec<T>, item: T) {
        if v.len() == v.capacity() {
            let old = vec_bytes(v);
            v.reserve(1);
            self.alloc(vec_bytes(v));
            self.free(old);
        }
        v.push(item);
    }

    /// Reallocates a charged vector down to its length.
    pub fn shrink<T>(&mut self, v: &mut Vec<T>) {
        let old = vec_bytes(v);
        v.shrink_to_fit();
        let new = vec_bytes(v);
        if new != old {
            self.alloc(new);
            self.free(old);
        }
    }

    /// Drops a charged vector.
    pub fn release<T>(&mut self, v: Vec<T>) {
        self.free(vec_bytes(&v));
    }

    pub fn usage(&self) -> MemoryUsage {
        MemoryUsage { live_bytes: self.live, peak_bytes: self.peak }
    }
}

/// Heap bytes owned by a vector's buffer (capacity, not length).
#[inline]
pub fn vec_bytes<T>(v: &Vec<T>) -> usize {
    v.capacity() * size_of::<T>()
}
