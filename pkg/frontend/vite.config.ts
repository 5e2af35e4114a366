import { defineConfig } from "vite";

// API base URL is configurable at build time (VITE_API_BASE) or at runtime
// (window.SPEECHCROWD_API_BASE); the dev server proxies to a local backend.
export default defineConfig({
  server: {
    proxy: {
      "^/(auth|me|tasks|submissions|audio|validation|stats|admin|healthz)": {
        target: process.env.SPEECHCROWD_API ?? "http://127.0.0.1:8080",
        changeOrigin: true,
      },
    },
  },
  build: {
    target: "es2022",
    sourcemap: true,
  },
});
