//! Command-line front end, statement emission and the certificate format.

mod cert;
mod cli;
mod emit;

#[cfg(test)]
mod tests;

pub use cert::{
    cert_signature, chain_constants, emit_certificate, parse_certificate, type_constants, write_certificate, CertError,
    CertificateFile, CERT_HEADER,
};
pub use cli::run;
pub use emit::{emit_statement, tower_telescope, EmitRequest};
