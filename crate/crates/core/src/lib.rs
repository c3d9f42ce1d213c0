pub mod bits;
pub mod channel;
pub mod code;
pub mod eptree;
pub mod error;
pub mod decode;
pub mod sgrand;
pub mod psgrand;
pub mod hybrid;
pub mod orb;
pub mod oracle;
pub mod harness;
