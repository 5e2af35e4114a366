import "./styles.css";
import { createApp } from "./app";
import { MicCapture } from "./audio/capture";

declare global {
  interface Window {
    SPEECHCROWD_API_BASE?: string;
  }
}

const baseUrl =
  window.SPEECHCROWD_API_BASE ?? (import.meta.env.VITE_API_BASE as string | undefined) ?? "";

const app = createApp({
  root: document.getElementById("root")!,
  baseUrl,
  capture: new MicCapture(),
});
app.router.start();
