"""802.11 management-frame vocabulary, channelization math and binary codec.

Everything in this module is a pure value type or a pure function; nothing
here touches the simulator clock or any shared state.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Union


class FrameError(ValueError):
    """Base class for malformed addresses, channels or frame records."""


class MacParseError(FrameError):
    pass


class ChannelError(FrameError):
    pass


class DecodeError(FrameError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


# ---------------------------------------------------------------------------
# MAC addresses
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class MacAddress:
    octets: bytes

    def __post_init__(self):
        if not isinstance(self.octets, bytes) or len(self.octets) != 6:
            raise MacParseError("MAC address must be exactly 6 octets")

    @property
    def is_broadcast(self) -> bool:
        return self.octets == b"\xff" * 6

    def __str__(self) -> str:
        return render_mac(self)

    def __repr__(self) -> str:
        return f"MacAddress({render_mac(self)})"


BROADCAST = MacAddress(b"\xff" * 6)

_HEX = set("0123456789abcdefABCDEF")


def parse_mac(text: str) -> MacAddress:
    """Parse a colon-separated MAC address, accepting upper or lower hex.

    Errors name the offending position so a bad scenario file is easy to fix.
    """
    if len(text) != 17:
        raise MacParseError(
            f"MAC {text!r} has length {len(text)}, expected 17 (XX:XX:XX:XX:XX:XX)"
        )
    octets = bytearray()
    for i, ch in enumerate(text):
        if i % 3 == 2:
            if ch != ":":
                raise MacParseError(
                    f"MAC {text!r}: expected ':' at position {i}, found {ch!r}"
                )
        elif ch not in _HEX:
            raise MacParseError(
                f"MAC {text!r}: non-hex digit {ch!r} at position {i}"
            )
    for group in text.split(":"):
        octets.append(int(group, 16))
    return MacAddress(bytes(octets))


def render_mac(m: MacAddress) -> str:
    """Canonical rendering: uppercase hex pairs joined by colons."""
    return ":".join(f"{b:02X}" for b in m.octets)


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------

class Band(Enum):
    GHZ24 = "2.4"
    GHZ5 = "5"


BAND24_NUMBERS: tuple[int, ...] = tuple(range(1, 15))
BAND5_NUMBERS: tuple[int, ...] = (
    36, 40, 44, 48, 52, 56, 60, 64,
    100, 104, 108, 112, 116, 132, 136, 140,
    149, 153, 157, 161, 165,
)

_VALID_NUMBERS = {Band.GHZ24: frozenset(BAND24_NUMBERS), Band.GHZ5: frozenset(BAND5_NUMBERS)}


@dataclass(frozen=True)
class Channel:
    band: Band
    number: int

    def __post_init__(self):
        if self.number not in _VALID_NUMBERS[self.band]:
            raise ChannelError(
                f"channel {self.number} is not valid in the {self.band.value} GHz band"
            )

    def __str__(self) -> str:
        return f"{self.band.value}/{self.number}"


def band_channels(band: Band) -> tuple[Channel, ...]:
    """All valid channels of a band in ascending order."""
    numbers = BAND24_NUMBERS if band is Band.GHZ24 else BAND5_NUMBERS
    return tuple(Channel(band, n) for n in numbers)


def channel_center_mhz(c: Channel) -> int:
    """Center frequency of a channel in MHz."""
    if c.band is Band.GHZ24:
        return 2484 if c.number == 14 else 2407 + 5 * c.number
    return 5000 + 5 * c.number


class Encryption(Enum):
    OPEN = "OPEN"
    WEP = "WEP"
    WPA = "WPA"
    WPA2 = "WPA2"
    WPA3 = "WPA3"


DEFAULT_REASON = 7  # class 3 frame received from nonassociated station


def _check_reason(code: int) -> int:
    if not 1 <= code <= 66:
        raise FrameError(f"reason code {code} outside 1..66")
    return code


def _check_essid(essid: bytes) -> bytes:
    if len(essid) > 32:
        raise FrameError(f"ESSID longer than 32 bytes ({len(essid)})")
    return essid


def essid_text(essid: bytes) -> str:
    """Display form of an ESSID: printable ASCII as-is, everything else escaped."""
    try:
        text = essid.decode("ascii")
        if text.isprintable():
            return text
    except UnicodeDecodeError:
        pass
    return "".join(chr(b) if 32 <= b < 127 else f"\\x{b:02x}" for b in essid)


# ---------------------------------------------------------------------------
# Management frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Beacon:
    bssid: MacAddress
    essid: bytes
    channel: Channel
    enc: Encryption
    seq: int = 0

    def __post_init__(self):
        _check_essid(self.essid)


@dataclass(frozen=True)
class ProbeRequest:
    src: MacAddress
    seq: int = 0


@dataclass(frozen=True)
class ProbeResponse:
    bssid: MacAddress
    essid: bytes
    channel: Channel
    enc: Encryption
    dst: MacAddress
    seq: int = 0

    def __post_init__(self):
        _check_essid(self.essid)


@dataclass(frozen=True)
class Authentication:
    src: MacAddress
    dst: MacAddress
    success: bool = True
    seq: int = 0


@dataclass(frozen=True)
class AssociationRequest:
    src: MacAddress
    bssid: MacAddress
    seq: int = 0


@dataclass(frozen=True)
class AssociationResponse:
    bssid: MacAddress
    dst: MacAddress
    success: bool
    seq: int = 0


@dataclass(frozen=True)
class Deauthentication:
    src: MacAddress
    dst: MacAddress
    bssid: MacAddress
    reason: int = DEFAULT_REASON
    seq: int = 0

    def __post_init__(self):
        _check_reason(self.reason)


@dataclass(frozen=True)
class Disassociation:
    src: MacAddress
    dst: MacAddress
    bssid: MacAddress
    reason: int = DEFAULT_REASON
    seq: int = 0

    def __post_init__(self):
        _check_reason(self.reason)


@dataclass(frozen=True)
class NullData:
    """Keepalive-style frame a client sends to its AP while associated.

    Real cells carry data traffic; this stands in for it so passive observers
    (scanner, flood victim discovery) have something to see.
    """
    src: MacAddress
    bssid: MacAddress
    seq: int = 0


ManagementFrame = Union[
    Beacon, ProbeRequest, ProbeResponse, Authentication,
    AssociationRequest, AssociationResponse, Deauthentication,
    Disassociation, NullData,
]

FRAME_TYPES = (
    Beacon, ProbeRequest, ProbeResponse, Authentication,
    AssociationRequest, AssociationResponse, Deauthentication,
    Disassociation, NullData,
)


def frame_src(f: ManagementFrame) -> MacAddress:
    """Transmitter address implied by a frame variant."""
    if isinstance(f, (Beacon, ProbeResponse, AssociationResponse)):
        return f.bssid
    return f.src


def frame_dst(f: ManagementFrame) -> MacAddress:
    """Receiver address implied by a frame variant (broadcast where absent)."""
    if isinstance(f, (Beacon, ProbeRequest)):
        return BROADCAST
    if isinstance(f, (AssociationRequest, NullData)):
        return f.bssid
    return f.dst


def forge(kind: str, src: MacAddress, dst: MacAddress, bssid: MacAddress,
          reason: int = DEFAULT_REASON, seq: int = 0) -> ManagementFrame:
    """Build a spoofed deauthentication or disassociation frame.

    The caller picks arbitrary addresses; that spoofing is possible at all is
    the whole attack surface of unprotected management frames.
    """
    if kind == "deauth":
        return Deauthentication(src=src, dst=dst, bssid=bssid, reason=reason, seq=seq)
    if kind == "disassoc":
        return Disassociation(src=src, dst=dst, bssid=bssid, reason=reason, seq=seq)
    raise FrameError(f"unknown forge kind {kind!r}")


# ---------------------------------------------------------------------------
# Capture records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapturedFrame:
    frame: ManagementFrame
    channel: Channel
    pwr: int  # link strength percent, 0..100
    t: int    # simulated milliseconds

    def __post_init__(self):
        if not 0 <= self.pwr <= 100:
            raise FrameError(f"pwr {self.pwr} outside 0..100")
        if self.t < 0:
            raise FrameError("capture time must be nonnegative")


# ---------------------------------------------------------------------------
# Binary codec
# ---------------------------------------------------------------------------
#
# Record layout (big-endian):
#   1B subtype | 2B seq | 6B addr1(dst) | 6B addr2(src) | 6B addr3(bssid) | payload
# Non-applicable address slots are zero-filled.  Payloads:
#   deauth/disassoc: 2B reason
#   beacon/probe-resp: 1B band (0=2.4, 1=5) | 1B channel number | 1B enc | 1B essid-len | essid
#   auth/assoc-resp: 1B success
# Subtype values reuse the real 802.11 management subtype numbers; 0x24 marks
# the null-data keepalive, which has no management subtype of its own.

SUBTYPE = {
    AssociationRequest: 0x00,
    AssociationResponse: 0x01,
    ProbeRequest: 0x04,
    ProbeResponse: 0x05,
    Beacon: 0x08,
    Disassociation: 0x0A,
    Authentication: 0x0B,
    Deauthentication: 0x0C,
    NullData: 0x24,
}
_SUBTYPE_REV = {v: k for k, v in SUBTYPE.items()}

_ENC_CODE = {Encryption.OPEN: 0, Encryption.WEP: 1, Encryption.WPA: 2,
             Encryption.WPA2: 3, Encryption.WPA3: 4}
_ENC_REV = {v: k for k, v in _ENC_CODE.items()}

_ZERO = b"\x00" * 6


def _addr3(f: ManagementFrame) -> tuple[bytes, bytes, bytes]:
    dst = f.dst.octets if hasattr(f, "dst") else _ZERO
    src = f.src.octets if hasattr(f, "src") else _ZERO
    bssid = f.bssid.octets if hasattr(f, "bssid") else _ZERO
    return dst, src, bssid


def _encode_channel(c: Channel) -> bytes:
    return bytes([1 if c.band is Band.GHZ5 else 0, c.number])


def encode_frame(f: ManagementFrame) -> bytes:
    subtype = SUBTYPE[type(f)]
    dst, src, bssid = _addr3(f)
    head = struct.pack(">BH", subtype, f.seq & 0xFFFF) + dst + src + bssid
    if isinstance(f, (Deauthentication, Disassociation)):
        return head + struct.pack(">H", f.reason)
    if isinstance(f, (Beacon, ProbeResponse)):
        return head + _encode_channel(f.channel) + bytes([_ENC_CODE[f.enc], len(f.essid)]) + f.essid
    if isinstance(f, (Authentication, AssociationResponse)):
        return head + bytes([1 if f.success else 0])
    return head  # probe-req, assoc-req, null-data carry no payload


def decode_frame(b: bytes) -> ManagementFrame:
    """Inverse of encode_frame; raises DecodeError with a byte offset."""
    if len(b) < 21:
        raise DecodeError("record shorter than fixed header", len(b))
    subtype, seq = struct.unpack(">BH", b[:3])
    cls = _SUBTYPE_REV.get(subtype)
    if cls is None:
        raise DecodeError(f"unknown subtype 0x{subtype:02X}", 0)
    dst = MacAddress(b[3:9])
    src = MacAddress(b[9:15])
    bssid = MacAddress(b[15:21])
    body = b[21:]

    def need(n: int, what: str):
        if len(body) < n:
            raise DecodeError(f"truncated {what}", 21 + len(body))

    if cls in (Deauthentication, Disassociation):
        need(2, "reason code")
        reason = struct.unpack(">H", body[:2])[0]
        _expect_end(body, 2)
        return cls(src=src, dst=dst, bssid=bssid, reason=reason, seq=seq)
    if cls in (Beacon, ProbeResponse):
        need(4, "beacon header")
        band = Band.GHZ5 if body[0] else Band.GHZ24
        try:
            channel = Channel(band, body[1])
        except ChannelError as e:
            raise DecodeError(str(e), 22) from e
        enc = _ENC_REV.get(body[2])
        if enc is None:
            raise DecodeError(f"unknown encryption code {body[2]}", 23)
        essid_len = body[3]
        if len(body) < 4 + essid_len:
            raise DecodeError("ESSID overruns record", 21 + len(body))
        essid = body[4:4 + essid_len]
        _expect_end(body, 4 + essid_len)
        if cls is Beacon:
            return Beacon(bssid=bssid, essid=essid, channel=channel, enc=enc, seq=seq)
        return ProbeResponse(bssid=bssid, essid=essid, channel=channel, enc=enc, dst=dst, seq=seq)
    if cls in (Authentication, AssociationResponse):
        need(1, "status flag")
        success = bool(body[0])
        _expect_end(body, 1)
        if cls is Authentication:
            return Authentication(src=src, dst=dst, success=success, seq=seq)
        return AssociationResponse(bssid=bssid, dst=dst, success=success, seq=seq)
    _expect_end(body, 0)
    if cls is ProbeRequest:
        return ProbeRequest(src=src, seq=seq)
    if cls is AssociationRequest:
        return AssociationRequest(src=src, bssid=bssid, seq=seq)
    return NullData(src=src, bssid=bssid, seq=seq)


def _expect_end(body: bytes, used: int):
    if len(body) > used:
        raise DecodeError("trailing bytes after record", 21 + used)


# ---------------------------------------------------------------------------
# Frame dump files (.wjf)
# ---------------------------------------------------------------------------

WJF_MAGIC = b"WJFRAME1"


def write_wjf(path, frames) -> None:
    """Write frames as a .wjf dump: magic, then [4B length][record] entries."""
    with open(path, "wb") as fh:
        fh.write(WJF_MAGIC)
        for f in frames:
            record = encode_frame(f)
            fh.write(struct.pack(">I", len(record)))
            fh.write(record)


def read_wjf(path) -> list[ManagementFrame]:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != WJF_MAGIC:
        raise DecodeError("bad .wjf magic", 0)
    frames = []
    pos = 8
    while pos < len(data):
        if pos + 4 > len(data):
            raise DecodeError("truncated record length", pos)
        (length,) = struct.unpack(">I", data[pos:pos + 4])
        pos += 4
        if pos + length > len(data):
            raise DecodeError("truncated record", pos)
        frames.append(decode_frame(data[pos:pos + length]))
        pos += length
    return frames


# ---------------------------------------------------------------------------
# JSON summaries (used by the event log; key order is fixed for determinism)
# ---------------------------------------------------------------------------

def frame_to_dict(f: ManagementFrame) -> dict:
    if isinstance(f, Beacon):
        return {"type": "beacon", "bssid": str(f.bssid), "essid": essid_text(f.essid),
                "channel": str(f.channel), "enc": f.enc.value, "seq": f.seq}
    if isinstance(f, ProbeRequest):
        return {"type": "probe_req", "src": str(f.src), "seq": f.seq}
    if isinstance(f, ProbeResponse):
        return {"type": "probe_resp", "bssid": str(f.bssid), "essid": essid_text(f.essid),
                "channel": str(f.channel), "enc": f.enc.value, "dst": str(f.dst), "seq": f.seq}
    if isinstance(f, Authentication):
        return {"type": "auth", "src": str(f.src), "dst": str(f.dst),
                "success": f.success, "seq": f.seq}
    if isinstance(f, AssociationRequest):
        return {"type": "assoc_req", "src": str(f.src), "bssid": str(f.bssid), "seq": f.seq}
    if isinstance(f, AssociationResponse):
        return {"type": "assoc_resp", "bssid": str(f.bssid), "dst": str(f.dst),
                "success": f.success, "seq": f.seq}
    if isinstance(f, Deauthentication):
        return {"type": "deauth", "src": str(f.src), "dst": str(f.dst),
                "bssid": str(f.bssid), "reason": f.reason, "seq": f.seq}
    if isinstance(f, Disassociation):
        return {"type": "disassoc", "src": str(f.src), "dst": str(f.dst),
                "bssid": str(f.bssid), "reason": f.reason, "seq": f.seq}
    if isinstance(f, NullData):
        return {"type": "null_data", "src": str(f.src), "bssid": str(f.bssid), "seq": f.seq}
    raise FrameError(f"unknown frame type {type(f).__name__}")
