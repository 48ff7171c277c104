//! UDP transport for force datagrams. One socket endpoint per process
//! direction: the sender owns its socket, the receiver owns its bind.

use std::net::UdpSocket;
use std::time::Duration;

use anyhow::{Context, Result};

use gpa_core::control::{decode_force_datagram, encode_force_datagram, ForceDatagram, DATAGRAM_LEN};

pub fn send(
    addr: &str,
    first_seq: u32,
    index_force_n: f32,
    thumb_force_n: f32,
    count: u32,
    interval_ms: u64,
) -> Result<()> {
    let socket = UdpSocket::bind("0.0.0.0:0").context("binding sender socket")?;
    for i in 0..count {
        let datagram = ForceDatagram {
            seq: first_seq.wrapping_add(i),
            index_force_n,
            thumb_force_n,
        };
        let bytes = encode_force_datagram(&datagram)?;
        socket
            .send_to(&bytes, addr)
            .with_context(|| format!("sending datagram to {addr}"))?;
        if interval_ms > 0 && i + 1 < count {
            std::thread::sleep(Duration::from_millis(interval_ms));
        }
    }
    Ok(())
}

/// Receive `count` datagrams and return them decoded; stops early on
/// timeout and reports what was collected.
pub fn recv(bind: &str, count: u32, timeout_ms: u64) -> Result<Vec<ForceDatagram>> {
    let socket = UdpSocket::bind(bind).with_context(|| format!("binding {bind}"))?;
    socket
        .set_read_timeout(Some(Duration::from_millis(timeout_ms.max(1))))
        .context("setting socket timeout")?;
    let mut out = Vec::new();
    let mut buf = [0u8; DATAGRAM_LEN + 16];
    while (out.len() as u32) < count {
        match socket.recv_from(&mut buf) {
            Ok((n, _)) => match decode_force_datagram(&buf[..n]) {
                Ok(d) => out.push(d),
                Err(e) => eprintln!("warning: dropping malformed datagram: {e}"),
            },
            Err(e)
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                break;
            }
            Err(e) => return Err(e).context("receiving datagram"),
        }
    }
    Ok(out)
}
