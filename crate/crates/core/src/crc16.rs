//! Table-driven CRC-16.
//!
//! The resolver hash uses CRC-16/ARC by default (poly 0x8005 reflected,
//! init 0, no final xor; check value 0xBB3D). Other common 16-bit variants
//! are available so the hash can be swapped per deployment.

/// Parameters of a 16-bit CRC in the usual Rocksoft model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc16Params {
    pub poly: u16,
    pub init: u16,
    pub reflect: bool,
    pub xorout: u16,
}

impl Crc16Params {
    pub const ARC: Self = Self {
        poly: 0x8005,
        init: 0x0000,
        reflect: true,
        xorout: 0x0000,
    };
    pub const MODBUS: Self = Self {
        poly: 0x8005,
        init: 0xFFFF,
        reflect: true,
        xorout: 0x0000,
    };
    pub const XMODEM: Self = Self {
        poly: 0x1021,
        init: 0x0000,
        reflect: false,
        xorout: 0x0000,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Crc16Variant {
    #[default]
    Arc,
    Modbus,
    Xmodem,
}

impl Crc16Variant {
    pub fn params(self) -> Crc16Params {
        match self {
            Crc16Variant::Arc => Crc16Params::ARC,
            Crc16Variant::Modbus => Crc16Params::MODBUS,
            Crc16Variant::Xmodem => Crc16Params::XMODEM,
        }
    }

    pub fn engine(self) -> &'static Crc16 {
        match self {
            Crc16Variant::Arc => &ARC,
            Crc16Variant::Modbus => &MODBUS,
            Crc16Variant::Xmodem => &XMODEM,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Crc16 {
    params: Crc16Params,
    table: [u16; 256],
}

static ARC: Crc16 = Crc16::new(Crc16Params::ARC);
static MODBUS: Crc16 = Crc16::new(Crc16Params::MODBUS);
static XMODEM: Crc16 = Crc16::new(Crc16Params::XMODEM);

const fn reverse16(mut v: u16) -> u16 {
    let mut r = 0u16;
    let mut i = 0;
    while i < 16 {
        r = (r << 1) | (v & 1);
        v >>= 1;
        i += 1;
    }
    r
}

impl Crc16 {
    pub const fn new(params: Crc16Params) -> Self {
        let mut table = [0u16; 256];
        let mut i = 0;
        if params.reflect {
            let poly = reverse16(params.poly);
            while i < 256 {
                let mut crc = i as u16;
                let mut bit = 0;
                while bit < 8 {
                    crc = if crc & 1 != 0 { (crc >> 1) ^ poly } else { crc >> 1 };
                    bit += 1;
                }
                table[i] = crc;
                i += 1;
            }
        } else {
            while i < 256 {
                let mut crc = (i as u16) << 8;
                let mut bit = 0;
                while bit < 8 {
                    crc = if crc & 0x8000 != 0 {
                        (crc << 1) ^ params.poly
                    } else {
                        crc << 1
                    };
                    bit += 1;
                }
                table[i] = crc;
                i += 1;
            }
        }
        Self { params, table }
    }

    pub fn params(&self) -> Crc16Params {
        self.params
    }

    pub fn checksum(&self, data: &[u8]) -> u16 {
        let mut crc = if self.params.reflect {
            reverse16(self.params.init)
        } else {
            self.params.init
        };
        if self.params.reflect {
            for &b in data {
                crc = (crc >> 8) ^ self.table[((crc ^ b as u16) & 0xFF) as usize];
            }
        } else {
            for &b in data {
                crc = (crc << 8) ^ self.table[(((crc >> 8) ^ b as u16) & 0xFF) as usize];
            }
        }
        crc ^ self.params.xorout
    }
}

/// CRC-16/ARC of `data`.
pub fn crc16(data: &[u8]) -> u16 {
    ARC.checksum(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Bit-at-a-time reference, MSB-first over (possibly reflected) input.
    fn bitwise(params: Crc16Params, data: &[u8]) -> u16 {
        let mut crc = params.init;
        for &byte in data {
            let b = if params.reflect { byte.reverse_bits() } else { byte };
            for i in (0..8).rev() {
                let bit = (b >> i) & 1 == 1;
                let top = crc & 0x8000 != 0;
                crc <<= 1;
                if bit ^ top {
                    crc ^= params.poly;
                }
            }
        }
        if params.reflect {
            crc = crc.reverse_bits();
        }
        crc ^ params.xorout
    }

    #[test]
    fn check_values() {
        assert_eq!(crc16(b""), 0x0000);
        assert_eq!(crc16(b"123456789"), 0xBB3D);
        assert_eq!(bitwise(Crc16Params::ARC, b"123456789"), 0xBB3D);
        assert_eq!(Crc16Variant::Modbus.engine().checksum(b"123456789"), 0x4B37);
        assert_eq!(Crc16Variant::Xmodem.engine().checksum(b"123456789"), 0x31C3);
    }

    #[test]
    fn table_matches_bitwise_on_short_inputs() {
        for v in [Crc16Variant::Arc, Crc16Variant::Modbus, Crc16Variant::Xmodem] {
            let engine = v.engine();
            for a in 0..=255u8 {
                assert_eq!(engine.checksum(&[a]), bitwise(v.params(), &[a]));
            }
        }
        let name = b"/video/a.mp4";
        assert_eq!(crc16(name), bitwise(Crc16Params::ARC, name));
    }
}
