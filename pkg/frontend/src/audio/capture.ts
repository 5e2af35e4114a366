// Microphone capture as raw Float32 PCM. A ScriptProcessorNode tap keeps
// the samples in hand for client-side transcode (MediaRecorder would hand
// back opus/webm, which the server does not accept).

import { downmixToMono, type PcmCapture } from "./wav";

export class MicPermissionDenied extends Error {
  constructor() {
    super("microphone permission denied");
    this.name = "MicPermissionDenied";
  }
}

export interface CaptureHandle {
  stop(): Promise<PcmCapture>;
}

export interface CaptureSource {
  start(): Promise<CaptureHandle>;
}

export class MicCapture implements CaptureSource {
  async start(): Promise<CaptureHandle> {
    let stream: MediaStream;
    try {
      stream = await navigator.mediaDevices.getUserMedia({
        audio: { channelCount: 1, echoCancellation: true, noiseSuppression: false },
      });
    } catch (error) {
      if (error instanceof DOMException && error.name === "NotAllowedError") {
        throw new MicPermissionDenied();
      }
      throw error;
    }

    const context = new AudioContext();
    const source = context.createMediaStreamSource(stream);
    const tap = context.createScriptProcessor(4096, 1, 1);
    const chunks: Float32Array[] = [];
    tap.onaudioprocess = (event) => {
      chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
    };
    source.connect(tap);
    tap.connect(context.destination);

    return {
      async stop(): Promise<PcmCapture> {
        tap.disconnect();
        source.disconnect();
        for (const track of stream.getTracks()) track.stop();
        const sampleRate = context.sampleRate;
        await context.close();
        const total = chunks.reduce((n, c) => n + c.length, 0);
        const samples = new Float32Array(total);
        let offset = 0;
        for (const chunk of chunks) {
          samples.set(chunk, offset);
          offset += chunk.length;
        }
        return { samples: downmixToMono([samples]), sampleRate };
      },
    };
  }
}
