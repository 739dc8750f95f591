/// <reference types="vitest" />
import { defineConfig } from "vite";

// In dev the engine runs separately (`foilscope serve --port 8000`); proxy the
// API paths so the client can use same-origin URLs everywhere.
const API = process.env.FOILSCOPE_API ?? "http://127.0.0.1:8000";

const proxy = {
  "/maps": API,
  "/sessions": API,
  "/polls": API,
};

export default defineConfig({
  server: { proxy },
  preview: { proxy },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
  },
});
