//! Physical-layer timing: a packet occupies an integer number of OFDM
//! symbols after a fixed preamble, slots add a guard interval, and a frame
//! holds as many whole slots as fit. All durations are integer nanoseconds
//! so every derived quantity is exact and platform-independent.

use core::fmt;

/// Timing and rate parameters of the shared channel.
///
/// Defaults model a 6 Mbps broadcast channel with 8 us OFDM symbols, a 40 us
/// preamble, 5 us slot guard, 13 us CSMA backoff slots, 58 us AIFS, and a
/// 100 ms frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhyParams {
    /// Payload data rate in bits per second.
    pub data_rate_bps: u64,
    /// Preamble duration prepended to every packet, in nanoseconds.
    pub preamble_ns: u64,
    /// Guard interval appended to every slot, in nanoseconds.
    pub guard_ns: u64,
    /// Frame duration, in nanoseconds.
    pub frame_ns: u64,
    /// CSMA backoff slot duration, in nanoseconds.
    pub csma_slot_ns: u64,
    /// Arbitration inter-frame space sensed before CSMA transmission,
    /// in nanoseconds.
    pub aifs_ns: u64,
    /// OFDM symbol duration, in nanoseconds. Packets always occupy a whole
    /// number of symbols.
    pub ofdm_symbol_ns: u64,
}

impl Default for PhyParams {
    fn default() -> Self {
        PhyParams {
            data_rate_bps: 6_000_000,
            preamble_ns: 40_000,
            guard_ns: 5_000,
            frame_ns: 100_000_000,
            csma_slot_ns: 13_000,
            aifs_ns: 58_000,
            ofdm_symbol_ns: 8_000,
        }
    }
}

/// Errors raised by [`PhyParams`] derivations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhyError {
    /// A duration or rate parameter that must be positive was zero.
    ZeroParameter,
    /// The data rate and symbol duration do not yield a whole number of
    /// bits per symbol.
    NonIntegerSymbolBits,
    /// The frame is shorter than a single slot, so no slots fit.
    FrameTooShort,
}

impl fmt::Display for PhyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhyError::ZeroParameter => write!(f, "phy parameters must be positive"),
            PhyError::NonIntegerSymbolBits => {
                write!(f, "data rate times symbol duration must be a whole bit count")
            }
            PhyError::FrameTooShort => write!(f, "frame shorter than one slot"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PhyError {}

impl PhyParams {
    fn validate(&self) -> Result<(), PhyError> {
        if self.data_rate_bps == 0
            || self.preamble_ns == 0
            || self.frame_ns == 0
            || self.csma_slot_ns == 0
            || self.aifs_ns == 0
            || self.ofdm_symbol_ns == 0
        {
            return Err(PhyError::ZeroParameter);
        }
        if self.bits_per_symbol() == 0 {
            return Err(PhyError::ZeroParameter);
        }
        Ok(())
    }

    /// Number of payload bits carried per OFDM symbol.
    ///
    /// Errors with [`PhyError::NonIntegerSymbolBits`] via [`Self::packet_duration_ns`]
    /// when the product is fractional.
    pub fn bits_per_symbol(&self) -> u64 {
        self.data_rate_bps * self.ofdm_symbol_ns / 1_000_000_000
    }

    /// Duration of a packet carrying `payload_bytes` of data: the preamble
    /// plus the smallest whole number of OFDM symbols holding the payload.
    pub fn packet_duration_ns(&self, payload_bytes: u32) -> Result<u64, PhyError> {
        self.validate()?;
        if self.data_rate_bps * self.ofdm_symbol_ns % 1_000_000_000 != 0 {
            return Err(PhyError::NonIntegerSymbolBits);
        }
        let bits = 8 * payload_bytes as u64;
        let symbols = bits.div_ceil(self.bits_per_symbol());
        Ok(self.preamble_ns + symbols * self.ofdm_symbol_ns)
    }

    /// Duration of one slot: packet duration plus the guard interval.
    pub fn slot_duration_ns(&self, payload_bytes: u32) -> Result<u64, PhyError> {
        Ok(self.packet_duration_ns(payload_bytes)? + self.guard_ns)
    }

    /// Number of whole slots that fit in one frame for the given payload.
    pub fn slot_count(&self, payload_bytes: u32) -> Result<u32, PhyError> {
        let slot = self.slot_duration_ns(payload_bytes)?;
        let n = self.frame_ns / slot;
        if n == 0 {
            return Err(PhyError::FrameTooShort);
        }
        Ok(n as u32)
    }
}
