import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    // conformance tests shell out to node + python
    testTimeout: 30000,
  },
});
