//! Stock-flow audits: the cross-checked accounting identities that
//! must hold after every settled quarter.
