//! Quarter scheduler: runs the phases of a quarter in their fixed
//! order and carries the cross-phase hand-offs.
