const NIL: u32 = u32::MAX;

/// Fully associative LRU set over dense vertex ids, kept as an intrusive
/// doubly linked list so every access is O(1).
#[derive(Debug, Clone)]
pub struct LruBuffer {
    capacity: usize,
    len: usize,
    prev: Vec<u32>,
    next: Vec<u32>,
    resident: Vec<bool>,
    head: u32,
    tail: u32,
    evictions: u64,
}

impl LruBuffer {
    pub fn new(capacity: usize, n_ids: usize) -> Self {
        LruBuffer {
            capacity,
            len: 0,
            prev: vec![NIL; n_ids],
            next: vec![NIL; n_ids],
            resident: vec![false; n_ids],
            head: NIL,
            tail: NIL,
            evictions: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn evictions(&self) -> u64 {
        self.evictions
    }

    pub fn contains(&self, id: u32) -> bool {
        self.resident[id as usize]
    }

    /// Touches `id`; returns whether it was resident.
    pub fn access(&mut self, id: u32) -> bool {
        if self.resident[id as usize] {
            if self.head != id {
                self.unlink(id);
                self.push_front(id);
            }
            return true;
        }
        if self.len == self.capacity {
            let victim = self.tail;
            self.unlink(victim);
            self.resident[victim as usize] = false;
            self.len -= 1;
            self.evictions += 1;
        }
        self.push_front(id);
        self.resident[id as usize] = true;
        self.len += 1;
        false
    }

    fn unlink(&mut self, id: u32) {
        let (p, n) = (self.prev[id as usize], self.next[id as usize]);
        if p == NIL {
            self.head = n;
        } else {
            self.next[p as usize] = n;
        }
        if n == NIL {
            self.tail = p;
        } else {
            self.prev[n as usize] = p;
        }
    }

    fn push_front(&mut self, id: u32) {
        self.prev[id as usize] = NIL;
        self.next[id as usize] = self.head;
        if self.head != NIL {
            self.prev[self.head as usize] = id;
        }
        self.head = id;
        if self.tail == NIL {
            self.tail = id;
        }
    }
}
