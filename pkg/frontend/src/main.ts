import { ApiClient } from './api.js';
import { ConsoleApp } from './app.js';

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get('api') ?? window.location.origin;
const token = params.get('token') ?? undefined;

const root = document.getElementById('app');
if (!root) throw new Error('missing #app element');

const app = new ConsoleApp(root, new ApiClient(baseUrl, token));
void app.start();
