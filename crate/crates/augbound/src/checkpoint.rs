//! Network checkpoint files (the byte layout is defined by the core crate).

use std::path::Path;

use augbound_core::nn::{checkpoint_bytes, network_from_checkpoint, Head, Network};

use crate::error::{read_file, write_file, AppResult};

pub fn save_checkpoint(path: &Path, net: &Network) -> AppResult<()> {
    write_file(path, &checkpoint_bytes(net))
}

/// The head is not stored in the file and must be supplied.
pub fn load_checkpoint(path: &Path, head: Head) -> AppResult<Network> {
    Ok(network_from_checkpoint(&read_file(path)?, head)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/net.bin");
        let net = Network::new(&[4, 3, 2], Head::Softmax, 9).unwrap();
        save_checkpoint(&path, &net).unwrap();
        assert_eq!(load_checkpoint(&path, Head::Softmax).unwrap(), net);
    }
}
