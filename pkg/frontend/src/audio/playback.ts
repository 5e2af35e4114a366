// Authenticated playback: <audio src> cannot carry a bearer token, so the
// blob is fetched through the API client and played from an object URL.

import type { ApiClient } from "../api/client";
import { h } from "../dom";

export async function mountPlayer(
  container: HTMLElement,
  api: ApiClient,
  audioRef: string,
): Promise<void> {
  const blob = await api.fetchAudio(audioRef);
  const url = URL.createObjectURL(blob);
  const audio = h("audio", { controls: true, src: url }) as HTMLAudioElement;
  audio.addEventListener("ended", () => URL.revokeObjectURL(url), { once: true });
  container.replaceChildren(audio);
  void audio.play().catch(() => {
    // autoplay refusal: the controls stay usable
  });
}
