// Client-side transcode of captured audio to the server's format contract:
// PCM16 mono WAV at 16 kHz. Browsers capture at whatever rate the device
// uses (44.1/48 kHz typically), so resampling happens here, not server-side.

export const TARGET_SAMPLE_RATE = 16_000;

export interface PcmCapture {
  samples: Float32Array;
  sampleRate: number;
}

export function downmixToMono(channels: Float32Array[]): Float32Array {
  if (channels.length === 0) return new Float32Array(0);
  if (channels.length === 1) return channels[0]!;
  const length = Math.min(...channels.map((c) => c.length));
  const mono = new Float32Array(length);
  for (let i = 0; i < length; i++) {
    let sum = 0;
    for (const channel of channels) sum += channel[i]!;
    mono[i] = sum / channels.length;
  }
  return mono;
}

export function resampleLinear(
  samples: Float32Array,
  fromRate: number,
  toRate: number,
): Float32Array {
  if (fromRate <= 0 || toRate <= 0) throw new Error("sample rates must be positive");
  if (fromRate === toRate || samples.length === 0) return samples;
  const outLength = Math.max(1, Math.round((samples.length * toRate) / fromRate));
  const out = new Float32Array(outLength);
  const step = fromRate / toRate;
  for (let i = 0; i < outLength; i++) {
    const position = i * step;
    const left = Math.floor(position);
    const right = Math.min(left + 1, samples.length - 1);
    const fraction = position - left;
    out[i] = samples[Math.min(left, samples.length - 1)]! * (1 - fraction) + samples[right]! * fraction;
  }
  return out;
}

export function floatTo16BitPcm(samples: Float32Array): Int16Array {
  const out = new Int16Array(samples.length);
  for (let i = 0; i < samples.length; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]!));
    out[i] = Math.round(clamped < 0 ? clamped * 0x8000 : clamped * 0x7fff);
  }
  return out;
}

/** Canonical 44-byte RIFF header + PCM16 little-endian body. */
export function encodeWavPcm16(samples: Float32Array, sampleRate: number): ArrayBuffer {
  const pcm = floatTo16BitPcm(samples);
  const buffer = new ArrayBuffer(44 + pcm.length * 2);
  const view = new DataView(buffer);
  const writeAscii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };
  writeAscii(0, "RIFF");
  view.setUint32(4, 36 + pcm.length * 2, true);
  writeAscii(8, "WAVE");
  writeAscii(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true); // byte rate
  view.setUint16(32, 2, true); // block align
  view.setUint16(34, 16, true); // bits per sample
  writeAscii(36, "data");
  view.setUint32(40, pcm.length * 2, true);
  for (let i = 0; i < pcm.length; i++) view.setInt16(44 + i * 2, pcm[i]!, true);
  return buffer;
}

/** Full capture-to-upload transcode: downmix handled upstream, resample to
 * 16 kHz, encode. */
export function captureToWav(capture: PcmCapture): Blob {
  const resampled = resampleLinear(capture.samples, capture.sampleRate, TARGET_SAMPLE_RATE);
  return new Blob([encodeWavPcm16(resampled, TARGET_SAMPLE_RATE)], { type: "audio/wav" });
}
