import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the round-trip test boots a real gateway process
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
