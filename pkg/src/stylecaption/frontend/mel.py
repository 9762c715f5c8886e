"""Log-mel spectrogram extraction from 16-bit PCM mono waveforms."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class MelConfig:
    n_mels: int = 80
    window_ms: float = 25.0
    shift_ms: float = 10.0
    f_min: float = 0.0
    f_max: float | None = None  # defaults to Nyquist
    log_floor: float = 1e-10

    def window_samples(self, sample_rate: int) -> int:
        return int(round(self.window_ms * sample_rate / 1000.0))

    def shift_samples(self, sample_rate: int) -> int:
        return int(round(self.shift_ms * sample_rate / 1000.0))


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int, f_min: float, f_max: float) -> np.ndarray:
    """Triangular mel filters over FFT bins, shape (n_mels, n_fft // 2 + 1)."""
    mel_points = np.linspace(_hz_to_mel(f_min), _hz_to_mel(f_max), n_mels + 2)
    hz_points = _mel_to_hz(mel_points)
    bins = hz_points / sample_rate * n_fft
    fbank = np.zeros((n_mels, n_fft // 2 + 1))
    for m in range(n_mels):
        left, center, right = bins[m], bins[m + 1], bins[m + 2]
        for k in range(int(np.floor(left)), min(int(np.ceil(right)) + 1, fbank.shape[1])):
            if left <= k < center and center > left:
                fbank[m, k] = (k - left) / (center - left)
            elif center <= k <= right and right > center:
                fbank[m, k] = (right - k) / (right - center)
    return fbank


def num_frames(n_samples: int, window: int, shift: int) -> int:
    """Frames fully contained in the signal: floor((n - window) / shift) + 1."""
    if n_samples < window:
        return 0
    return (n_samples - window) // shift + 1


def compute_mel(waveform: np.ndarray, sample_rate: int, cfg: MelConfig = MelConfig()) -> np.ndarray:
    """Compute log-mel energies, shape (T, n_mels). Deterministic.

    Frames are Hann-windowed, zero-padded to the next power of two, and the
    power spectrum is mapped through the triangular filterbank with a log
    floor of ``cfg.log_floor``.
    """
    if sample_rate <= 0:
        raise ValueError(f"sample rate must be positive, got {sample_rate}")
    waveform = np.asarray(waveform, dtype=np.float64).reshape(-1)
    window = cfg.window_samples(sample_rate)
    shift = cfg.shift_samples(sample_rate)
    n_frames = num_frames(waveform.size, window, shift)
    if n_frames < 1:
        raise ValueError(
            f"waveform of {waveform.size} samples is shorter than one {window}-sample window"
        )

    n_fft = 1
    while n_fft < window:
        n_fft *= 2
    hann = np.hanning(window)
    f_max = cfg.f_max if cfg.f_max is not None else sample_rate / 2.0
    fbank = mel_filterbank(cfg.n_mels, n_fft, sample_rate, cfg.f_min, f_max)

    idx = np.arange(window)[None, :] + shift * np.arange(n_frames)[:, None]
    frames = waveform[idx] * hann[None, :]
    spectrum = np.fft.rfft(frames, n=n_fft, axis=1)
    power = (spectrum.real**2 + spectrum.imag**2) / n_fft
    mel = power @ fbank.T
    return np.log(np.maximum(mel, cfg.log_floor)).astype(np.float32)


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a 16-bit PCM mono WAV file; returns (float waveform in [-1, 1], rate)."""
    with wave.open(str(path), "rb") as wav:
        if wav.getnchannels() != 1:
            raise ValueError(f"{path}: expected mono, got {wav.getnchannels()} channels")
        if wav.getsampwidth() != 2:
            raise ValueError(f"{path}: expected 16-bit PCM, got {wav.getsampwidth() * 8}-bit")
        rate = wav.getframerate()
        raw = wav.readframes(wav.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return samples, rate


def write_wav(path: str | Path, waveform: np.ndarray, sample_rate: int) -> None:
    """Write a float waveform in [-1, 1] as 16-bit PCM mono."""
    clipped = np.clip(np.asarray(waveform, dtype=np.float64), -1.0, 1.0)
    pcm = (clipped * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(sample_rate)
        wav.writeframes(pcm.tobytes())
