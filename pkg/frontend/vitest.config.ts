import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'jsdom',
    include: ['tests/**/*.test.ts'],
    // Integration tests boot the real backend; allow for its startup.
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
