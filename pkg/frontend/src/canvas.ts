/** Replay a frame's draw ops onto a 2-D canvas context. */

import { Frame } from './frame';

export function paint(frame: Frame, ctx: CanvasRenderingContext2D): void {
  ctx.clearRect(0, 0, frame.width, frame.height);
  ctx.font = '11px sans-serif';
  let noticeRow = 0;
  for (const op of frame.ops) {
    switch (op.kind) {
      case 'point': {
        ctx.fillStyle = op.color;
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.radius, 0, 2 * Math.PI);
        ctx.fill();
        break;
      }
      case 'polyline': {
        ctx.strokeStyle = op.color;
        ctx.beginPath();
        op.points.forEach(([x, y], idx) => (idx === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.stroke();
        break;
      }
      case 'arrow': {
        ctx.strokeStyle = op.color;
        ctx.beginPath();
        ctx.moveTo(op.from[0], op.from[1]);
        ctx.lineTo(op.to[0], op.to[1]);
        ctx.stroke();
        const angle = Math.atan2(op.to[1] - op.from[1], op.to[0] - op.from[0]);
        ctx.beginPath();
        ctx.moveTo(op.to[0], op.to[1]);
        ctx.lineTo(op.to[0] - 6 * Math.cos(angle - 0.4), op.to[1] - 6 * Math.sin(angle - 0.4));
        ctx.lineTo(op.to[0] - 6 * Math.cos(angle + 0.4), op.to[1] - 6 * Math.sin(angle + 0.4));
        ctx.closePath();
        ctx.fillStyle = op.color;
        ctx.fill();
        break;
      }
      case 'label': {
        ctx.fillStyle = '#333333';
        ctx.fillText(op.text, op.x, op.y);
        break;
      }
      case 'marker': {
        ctx.strokeStyle = op.color;
        ctx.beginPath();
        ctx.moveTo(op.x, 0);
        ctx.lineTo(op.x, frame.height);
        ctx.stroke();
        break;
      }
      case 'notice': {
        ctx.fillStyle = '#8a2a2a';
        ctx.fillText(op.text, 8, 14 + 14 * noticeRow);
        noticeRow += 1;
        break;
      }
    }
  }
}
